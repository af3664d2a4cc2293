/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_clustering_free: (a: number, b: number) => void;
export const __wbg_landscape_free: (a: number, b: number) => void;
export const cluster: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint) => [number, number, number];
export const clustering_labels: (a: number) => [number, number];
export const clustering_note: (a: number) => [number, number];
export const clustering_silhouette: (a: number) => number;
export const evaluate: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const landscape_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const landscape_optimum: (a: number) => [number, number];
export const landscape_resolution: (a: number) => number;
export const landscape_values: (a: number) => [number, number];
export const lhs_design: (a: number, b: bigint, c: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
