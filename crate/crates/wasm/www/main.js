import init, { simulate, analyze, lattice } from "./pkg/iori_wasm.js";

const $ = (id) => document.getElementById(id);

function configText() {
  return [
    `preset = ${$("preset").value}`,
    `agents = ${$("agents").value}`,
    `rounds = ${$("rounds").value}`,
    `memory = ${$("memory").value}`,
    `alpha = ${$("alpha").value}`,
    `fundamental_probability = ${$("pi").value}`,
    `seed = ${$("seed").value}`,
  ].join("\n");
}

// Preset defaults fill the form; the user can then tweak them.
const PRESET_FORM = {
  "A": [1024, 80000, 20, 0.7], "B": [1024, 80000, 40, 0.9], "no-esteem": [1024, 80000, 1, 0.7],
  "A-small": [64, 6000, 20, 0.7], "B-small": [64, 6000, 40, 0.9], "no-esteem-small": [64, 6000, 1, 0.7],
};
$("preset").addEventListener("change", () => {
  const [n, l, tau, pi] = PRESET_FORM[$("preset").value];
  $("agents").value = n; $("rounds").value = l; $("memory").value = tau; $("pi").value = pi;
});

function frame(canvas, title) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#222";
  ctx.font = "12px system-ui";
  ctx.fillText(title, 8, 14);
  return ctx;
}

function plotLines(canvas, title, series, { logY = false, bars = false } = {}) {
  const ctx = frame(canvas, title);
  const pad = 24, w = canvas.width - 2 * pad, h = canvas.height - 2 * pad;
  const tf = (v) => (logY ? Math.log(v) : v);
  const all = series.flatMap((s) => s.values.filter((v) => Number.isFinite(tf(v))).map(tf));
  if (all.length === 0) return;
  let lo = Math.min(...all), hi = Math.max(...all);
  if (bars) lo = Math.min(lo, 0);
  if (hi === lo) hi = lo + 1;
  const y = (v) => pad + h - ((tf(v) - lo) / (hi - lo)) * h;
  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    const n = s.values.length, x = (k) => pad + (n > 1 ? (k / (n - 1)) * w : 0);
    if (bars) {
      const bw = Math.max(1, w / n - 1);
      s.values.forEach((v, k) => ctx.fillRect(x(k) - bw / 2, Math.min(y(v), y(0)), bw, Math.abs(y(0) - y(v))));
    } else {
      ctx.beginPath();
      s.values.forEach((v, k) => (k ? ctx.lineTo(x(k), y(v)) : ctx.moveTo(x(k), y(v))));
      ctx.stroke();
    }
  }
  ctx.fillStyle = "#666";
  ctx.fillText(`${(logY ? Math.exp(hi) : hi).toPrecision(4)}`, 2, pad - 2);
  ctx.fillText(`${(logY ? Math.exp(lo) : lo).toPrecision(4)}`, 2, pad + h + 14);
}

function showStats(stats, extra = "") {
  const g = stats.gamma == null ? `fit failed (${stats.fit_error})` : `${stats.gamma.toFixed(3)} (R² ${stats.r_squared.toFixed(3)})`;
  const k = stats.excess_kurtosis == null ? "n/a" : stats.excess_kurtosis.toFixed(2);
  $("summary").textContent = `${extra}${stats.observations} daily returns, excess kurtosis ${k}, |r| ACF exponent ${g}`;
  plotLines($("returns"), "daily log returns", [{ values: stats.returns, color: "#246" }]);
  plotLines($("acf"), "ACF: returns (grey), |returns| (red)", [
    { values: stats.return_acf.slice(1), color: "#999" },
    { values: stats.abs_acf.slice(1), color: "#c22" },
  ]);
  plotLines($("hist"), "return histogram", [{ values: stats.counts, color: "#474" }], { bars: true });
}

function guarded(fn) {
  return () => {
    $("status").textContent = "";
    try {
      fn();
    } catch (e) {
      $("status").textContent = String(e.message ?? e);
    }
  };
}

$("run").addEventListener("click", guarded(() => {
  const out = JSON.parse(simulate(configText()));
  plotLines($("prices"), "price (blue) and fundamental (orange), log scale", [
    { values: out.prices, color: "#24a" },
    { values: out.fundamental, color: "#e80" },
  ], { logY: true });
  showStats(out.stats, `${out.rounds} rounds, ${out.degenerate_rounds} one-sided rounds. `);
}));

$("analyze").addEventListener("click", guarded(() => {
  const out = JSON.parse(analyze($("csv").value, Number($("fitmax").value)));
  frame($("prices"), "price: n/a for pasted data");
  const skipped = out.rejected_rows.length ? `Skipped lines ${out.rejected_rows.join(", ")}. ` : "";
  showStats(out.stats, skipped);
}));

$("snap").addEventListener("click", guarded(() => {
  const out = JSON.parse(lattice(configText(), Number($("rounds").value)));
  const canvas = $("lattice"), ctx = canvas.getContext("2d");
  const cell = canvas.width / out.side;
  const colour = { "-1": "#c22", "0": "#ddd", "1": "#2a4" };
  out.spins.forEach((s, i) => {
    ctx.fillStyle = colour[s];
    ctx.fillRect((i % out.side) * cell, Math.floor(i / out.side) * cell, cell, cell);
  });
  $("summary").textContent = `round ${out.round}, price ${out.price.toFixed(4)}: green buy, grey hold, red sell`;
}));

await init();
