/* tslint:disable */
/* eslint-disable */

export class Clustering {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    labels(): Uint32Array;
    note(): string | undefined;
    silhouette(): number;
}

/**
 * A blended landscape sampled on a `resolution x resolution` grid over `[-5, 5]^2`.
 */
export class Landscape {
    free(): void;
    [Symbol.dispose](): void;
    constructor(class_i: number, class_j: number, instance: number, alpha: number, resolution: number);
    optimum(): Float64Array;
    resolution(): number;
    /**
     * Row-major `log10` objective values.
     */
    values(): Float64Array;
}

/**
 * Clusters row-major points of dimension `dim` and scores the result.
 *
 * `algorithm` is one of `kmeans`, `agglomerative`, `gmm`, `birch`; `option`
 * is its parameter (`n_init`, linkage, covariance type or threshold) as text.
 */
export function cluster(points: Float64Array, dim: number, algorithm: string, option: string, k: number, seed: bigint): Clustering;

/**
 * Objective values of a blended problem at row-major 2-D points.
 */
export function evaluate(class_i: number, class_j: number, instance: number, alpha: number, points: Float64Array): Float64Array;

/**
 * A Latin Hypercube design over `[-5, 5]^2`, row-major.
 */
export function lhs_design(n: number, seed: bigint, midpoint: boolean): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_clustering_free: (a: number, b: number) => void;
    readonly __wbg_landscape_free: (a: number, b: number) => void;
    readonly cluster: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint) => [number, number, number];
    readonly clustering_labels: (a: number) => [number, number];
    readonly clustering_note: (a: number) => [number, number];
    readonly clustering_silhouette: (a: number) => number;
    readonly evaluate: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly landscape_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly landscape_optimum: (a: number) => [number, number];
    readonly landscape_resolution: (a: number) => number;
    readonly landscape_values: (a: number) => [number, number];
    readonly lhs_design: (a: number, b: bigint, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
