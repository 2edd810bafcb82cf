import init, { stepSizeCurve, quadraticPath, wideNet } from "./pkg/deltaclip_web.js";

const $ = (id) => document.getElementById(id);
const log10 = Math.log10;

// Sliders hold log10 of the value unless listed here.
const linear = new Set(["q-theta", "q-steps", "n-samples", "n-seed"]);
const pow2 = new Set(["n-width"]);

function value(id) {
  const x = Number($(id).value);
  if (linear.has(id)) return x;
  if (pow2.has(id)) return 2 ** x;
  return 10 ** x;
}

function bindOutputs(containerId, onChange) {
  for (const input of $(containerId).querySelectorAll("input")) {
    const out = input.nextElementSibling;
    const show = () => { out.textContent = fmt(value(input.id)); };
    show();
    input.addEventListener("input", () => { show(); onChange(); });
  }
}

function fmt(x) {
  if (!Number.isFinite(x)) return String(x);
  if (Number.isInteger(x)) return String(x);
  return Math.abs(x) >= 1e-3 && Math.abs(x) < 1e4 ? x.toPrecision(3) : x.toExponential(2);
}

// Plot frame mapping data to pixels, with optional log axes.
function frame(canvas, xs, ys, { logX = false, logY = false, pad = 40 } = {}) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const tx = logX ? log10 : (v) => v;
  const ty = logY ? log10 : (v) => v;
  const fin = (a, t) => a.filter((v) => Number.isFinite(t(v)));
  const xv = fin(xs, tx).map(tx);
  const yv = fin(ys, ty).map(ty);
  let [x0, x1] = [Math.min(...xv), Math.max(...xv)];
  let [y0, y1] = [Math.min(...yv), Math.max(...yv)];
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) { y0 -= 0.5; y1 += 0.5; }
  const W = canvas.width - 2 * pad;
  const H = canvas.height - 2 * pad;
  const px = (v) => pad + ((tx(v) - x0) / (x1 - x0)) * W;
  const py = (v) => pad + H - ((ty(v) - y0) / (y1 - y0)) * H;
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, W, H);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  const label = (v, log) => (log ? "1e" + v.toFixed(1) : fmt(v));
  ctx.fillText(label(x0, logX), pad, canvas.height - pad + 14);
  ctx.fillText(label(x1, logX), pad + W - 30, canvas.height - pad + 14);
  ctx.fillText(label(y1, logY), 2, pad + 4);
  ctx.fillText(label(y0, logY), 2, pad + H);
  return { ctx, px, py };
}

function line(f, xs, ys, color) {
  const { ctx, px, py } = f;
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  let pen = false;
  for (let i = 0; i < xs.length; i++) {
    const X = px(xs[i]);
    const Y = py(ys[i]);
    if (!Number.isFinite(X) || !Number.isFinite(Y)) { pen = false; continue; }
    if (pen) ctx.lineTo(X, Y); else ctx.moveTo(X, Y);
    pen = true;
  }
  ctx.stroke();
}

function column(rows, width, k) {
  const out = [];
  for (let i = k; i < rows.length; i += width) out.push(rows[i]);
  return out;
}

function guarded(statsId, draw) {
  return () => {
    try {
      draw();
      $(statsId)?.classList.remove("error");
    } catch (e) {
      console.error(e);
      const el = $(statsId);
      if (el) { el.textContent = String(e.message ?? e); el.classList.add("error"); }
    }
  };
}

const drawCurve = guarded(null, () => {
  const rows = stepSizeCurve(value("c-eta"), value("c-gamma"), value("c-delta"), 1e-3, 1e4, 200);
  const g = column(rows, 3, 0);
  const hc = column(rows, 3, 1);
  const hd = column(rows, 3, 2);
  const f = frame($("curve"), g, hc.concat(hd), { logX: true, logY: true });
  line(f, g, hc, "#888");
  line(f, g, hd, "#c33");
});

let start = [2.0, 1.5];
const SPAN = 3;

const drawQuad = guarded("quad-stats", () => {
  const kappa = value("q-kappa");
  const eta = value("q-eta");
  const delta = value("q-delta");
  const path = quadraticPath(1, kappa, start[0], start[1], eta, value("q-gamma"), delta,
    value("q-theta"), value("q-steps"), 1n);
  const rows = path.rows;
  const C = path.columns;
  const xs = column(rows, C, 0);
  const ys = column(rows, C, 1);
  const loss = column(rows, C, 2);
  const env = column(rows, C, 4);

  const canvas = $("plane");
  const ctx = canvas.getContext("2d");
  const s = canvas.width / (2 * SPAN);
  const px = (x) => canvas.width / 2 + x * s;
  const py = (y) => canvas.height / 2 - y * s;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#ddd";
  for (const c of [0.05, 0.2, 0.5, 1, 2, 4, 8]) {
    ctx.beginPath();
    ctx.ellipse(px(0), py(0), Math.sqrt(2 * c) * s, Math.sqrt(2 * c / kappa) * s, 0, 0, 2 * Math.PI);
    ctx.stroke();
  }
  if (Number.isFinite(path.radius)) {
    ctx.strokeStyle = "#2a2";
    ctx.beginPath();
    ctx.arc(px(start[0]), py(start[1]), path.radius * s, 0, 2 * Math.PI);
    ctx.stroke();
  }
  line({ ctx, px, py }, xs, ys, "#26a");
  ctx.fillStyle = "#000";
  ctx.fillRect(px(start[0]) - 3, py(start[1]) - 3, 6, 6);

  const t = loss.map((_, i) => i);
  const f = frame($("quad-loss"), t, loss.concat(env.filter(Number.isFinite)).filter((v) => v > 0), { logY: true });
  line(f, t, loss, "#26a");
  line(f, t, env, "#c33");

  const beta = Math.max(1, kappa);
  const mu = 2 * Math.min(1, kappa);
  $("quad-stats").textContent =
    `β = ${fmt(beta)}  μ = ${fmt(mu)}\n` +
    `ηβ = ${fmt(eta * beta)}  ημ = ${fmt(eta * mu)}\n` +
    `final loss = ${fmt(loss[loss.length - 1])}\n` +
    `trust radius = ${Number.isFinite(path.radius) ? fmt(path.radius) : "n/a"}`;
  path.free();
});

$("plane").addEventListener("click", (e) => {
  const canvas = $("plane");
  const r = canvas.getBoundingClientRect();
  const s = canvas.width / (2 * SPAN);
  const cx = ((e.clientX - r.left) * canvas.width) / r.width;
  const cy = ((e.clientY - r.top) * canvas.height) / r.height;
  start = [(cx - canvas.width / 2) / s, (canvas.height / 2 - cy) / s];
  drawQuad();
});

const runNet = guarded("net-stats", () => {
  const width = value("n-width");
  const run = wideNet(width, value("n-samples"), value("n-eta"), 1, value("n-delta"), 3000, BigInt(value("n-seed")));
  const losses = run.losses;
  const t = losses.map((_, i) => i);
  const f = frame($("net-loss"), t, losses.filter((v) => v > 0), { logY: true });
  line(f, t, losses, "#26a");
  $("net-stats").textContent =
    `λ₀ = ${fmt(run.lambda0)}\n` +
    `empirical PL = ${fmt(run.empiricalPl)}\n` +
    `steps = ${losses.length - 1}${run.diverged ? " (diverged)" : ""}\n` +
    `final loss = ${fmt(losses[losses.length - 1])}`;
  run.free();
});

await init();
bindOutputs("curve-controls", drawCurve);
bindOutputs("quad-controls", drawQuad);
bindOutputs("net-controls", () => {});
$("n-run").addEventListener("click", runNet);
drawCurve();
drawQuad();
runNet();
