import init, { Landscape, lhs_design, evaluate, cluster } from "./pkg/landmap_wasm.js";

const NAMES = [
  "Sphere", "Ellipsoid", "Rastrigin", "Bueche-Rastrigin", "Linear slope", "Attractive sector",
  "Step ellipsoid", "Rosenbrock", "Rosenbrock rotated", "Ellipsoid rotated", "Discus", "Bent cigar",
  "Sharp ridge", "Different powers", "Rastrigin rotated", "Weierstrass", "Schaffer F7",
  "Schaffer F7 ill-cond.", "Griewank-Rosenbrock", "Schwefel", "Gallagher 101", "Gallagher 21",
  "Katsuura", "Lunacek bi-Rastrigin",
];
const OPTIONS = {
  kmeans: ["10", "20"],
  agglomerative: ["ward", "average", "complete"],
  gmm: ["full", "tied", "diag"],
  birch: ["0.5", "1.0"],
};
const PALETTE = ["#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#ffff33", "#a65628", "#f781bf", "#999999"];

const $ = (id) => document.getElementById(id);
const canvas = $("plot");
const ctx = canvas.getContext("2d");
let labels = null;

function fill(select, values, labelOf, chosen) {
  select.replaceChildren(...values.map((v) => new Option(labelOf(v), v, false, v === chosen)));
}

function colour(t) {
  // dark blue (low) to yellow (high)
  const r = Math.round(255 * Math.min(1, Math.max(0, 1.8 * t - 0.5)));
  const g = Math.round(255 * Math.min(1, Math.max(0, 1.4 * t)));
  const b = Math.round(255 * Math.min(1, Math.max(0, 0.7 - 0.9 * t)) + 60 * (1 - t));
  return [r, g, Math.min(255, b)];
}

function toCanvas(x1, x2) {
  return [((x1 + 5) / 10) * canvas.width, ((5 - x2) / 10) * canvas.height];
}

function params() {
  return {
    ci: Number($("ci").value), cj: Number($("cj").value), inst: Number($("inst").value),
    alpha: Number($("alpha").value), res: Number($("res").value),
    n: Number($("n").value), seed: BigInt($("seed").value || 0), mid: $("mid").checked,
  };
}

function design(p) {
  return p.n > 0 ? lhs_design(p.n, p.seed, p.mid) : new Float64Array();
}

function draw() {
  const p = params();
  $("alpha-out").textContent = p.alpha.toFixed(2);
  if (p.ci === p.cj) {
    $("status").textContent = "choose two different classes";
    return;
  }
  try {
    const land = new Landscape(p.ci, p.cj, p.inst, p.alpha, p.res);
    const v = land.values();
    const res = land.resolution();
    let lo = Infinity, hi = -Infinity;
    for (const x of v) { lo = Math.min(lo, x); hi = Math.max(hi, x); }
    const img = ctx.createImageData(res, res);
    for (let i = 0; i < v.length; i++) {
      const [r, g, b] = colour((v[i] - lo) / (hi - lo || 1));
      img.data.set([r, g, b, 255], 4 * i);
    }
    const off = new OffscreenCanvas(res, res);
    off.getContext("2d").putImageData(img, 0, 0);
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(off, 0, 0, canvas.width, canvas.height);

    const pts = design(p);
    for (let i = 0; i < pts.length / 2; i++) {
      const [cx, cy] = toCanvas(pts[2 * i], pts[2 * i + 1]);
      ctx.beginPath();
      ctx.arc(cx, cy, labels ? 4 : 2.5, 0, 2 * Math.PI);
      ctx.fillStyle = labels ? PALETTE[labels[i] % PALETTE.length] : "#fff";
      ctx.fill();
      ctx.strokeStyle = "#000";
      ctx.stroke();
    }
    const [ox, oy] = toCanvas(...land.optimum());
    ctx.strokeStyle = "#fff";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(ox - 7, oy - 7); ctx.lineTo(ox + 7, oy + 7);
    ctx.moveTo(ox + 7, oy - 7); ctx.lineTo(ox - 7, oy + 7);
    ctx.stroke();
    ctx.lineWidth = 1;
    land.free();
    if (!labels) {
      $("status").textContent =
        `${NAMES[p.ci - 1]} blended with ${NAMES[p.cj - 1]}, log10 f in [${lo.toFixed(2)}, ${hi.toFixed(2)}]`;
    }
  } catch (e) {
    $("status").textContent = String(e);
  }
}

function runClustering() {
  const p = params();
  const pts = design(p);
  const n = pts.length / 2;
  try {
    const y = evaluate(p.ci, p.cj, p.inst, p.alpha, pts);
    const feats = new Float64Array(3 * n);
    for (let i = 0; i < n; i++) {
      feats[3 * i] = pts[2 * i];
      feats[3 * i + 1] = pts[2 * i + 1];
      feats[3 * i + 2] = Math.log10(y[i]);
    }
    const c = cluster(feats, 3, $("alg").value, $("opt").value, Number($("k").value), p.seed);
    labels = c.labels();
    const note = c.note();
    $("status").textContent = `silhouette ${c.silhouette().toFixed(4)}` + (note ? ` (${note})` : "");
    c.free();
  } catch (e) {
    labels = null;
    $("status").textContent = String(e);
  }
  draw();
}

await init();
const classes = NAMES.map((_, i) => String(i + 1));
fill($("ci"), classes, (c) => `f${c} ${NAMES[c - 1]}`, "1");
fill($("cj"), classes, (c) => `f${c} ${NAMES[c - 1]}`, "8");
fill($("opt"), OPTIONS.kmeans, (o) => o, "10");
$("alg").addEventListener("change", () => fill($("opt"), OPTIONS[$("alg").value], (o) => o));
for (const id of ["ci", "cj", "inst", "alpha", "res", "n", "seed", "mid"]) {
  $(id).addEventListener("input", () => { labels = null; draw(); });
}
$("run-cluster").addEventListener("click", runClustering);
$("clear-cluster").addEventListener("click", () => { labels = null; draw(); });
draw();
