import init, { solve, sweep, benchmark } from "./pkg/lease_game_wasm.js";

const fmt = (x, d = 6) => (x === null || x === undefined ? "NaN" : Number(x).toFixed(d));

function readControls(section) {
  const values = {};
  for (const input of section.querySelectorAll("input")) {
    if (input.type === "checkbox") {
      values[input.name] = input.checked;
    } else {
      values[input.name] = parseFloat(input.value);
      const out = input.parentElement.querySelector("output");
      if (out) out.textContent = input.value;
    }
  }
  return values;
}

function bind(id, render) {
  const section = document.getElementById(id);
  const target = document.getElementById(`${id}-out`);
  const update = () => {
    try {
      render(readControls(section), target);
    } catch (err) {
      target.innerHTML = `<p class="error">${err.message ?? err}</p>`;
    }
  };
  section.addEventListener("input", update);
  update();
}

function table(rows) {
  const body = rows
    .map(([k, v]) => `<tr><th>${k}</th><td>${v}</td></tr>`)
    .join("");
  return `<table>${body}</table>`;
}

// Minimal line plot. series: [{ points: [[x, y]], color }]; NaN/null y values break the line.
function plot(canvas, series, { shade = [], vlines = [], dots = [] } = {}) {
  const dpr = window.devicePixelRatio || 1;
  const w = canvas.clientWidth, h = canvas.clientHeight;
  canvas.width = w * dpr;
  canvas.height = h * dpr;
  const ctx = canvas.getContext("2d");
  ctx.scale(dpr, dpr);
  ctx.clearRect(0, 0, w, h);

  const pts = series.flatMap((s) => s.points).filter(([, y]) => Number.isFinite(y));
  if (pts.length === 0) return;
  let [x0, x1] = [Math.min(...pts.map((p) => p[0])), Math.max(...pts.map((p) => p[0]))];
  let [y0, y1] = [Math.min(...pts.map((p) => p[1])), Math.max(...pts.map((p) => p[1]))];
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const pad = { l: 56, r: 12, t: 10, b: 26 };
  const X = (x) => pad.l + ((x - x0) / (x1 - x0)) * (w - pad.l - pad.r);
  const Y = (y) => h - pad.b - ((y - y0) / (y1 - y0)) * (h - pad.t - pad.b);

  ctx.fillStyle = "#fbeee6";
  for (const [a, b] of shade) ctx.fillRect(X(a), pad.t, X(b) - X(a), h - pad.t - pad.b);

  ctx.strokeStyle = "#bbb";
  ctx.fillStyle = "#555";
  ctx.font = "11px system-ui";
  ctx.beginPath();
  ctx.moveTo(pad.l, pad.t);
  ctx.lineTo(pad.l, h - pad.b);
  ctx.lineTo(w - pad.r, h - pad.b);
  ctx.stroke();
  for (let k = 0; k <= 4; k++) {
    const xv = x0 + ((x1 - x0) * k) / 4, yv = y0 + ((y1 - y0) * k) / 4;
    ctx.fillText(xv.toFixed(3), X(xv) - 14, h - 8);
    ctx.fillText(yv.toFixed(4), 4, Y(yv) + 4);
  }

  ctx.setLineDash([4, 3]);
  ctx.strokeStyle = "#999";
  for (const v of vlines) {
    if (v < x0 || v > x1) continue;
    ctx.beginPath();
    ctx.moveTo(X(v), pad.t);
    ctx.lineTo(X(v), h - pad.b);
    ctx.stroke();
  }
  ctx.setLineDash([]);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.8;
    ctx.beginPath();
    let pen = false;
    for (const [x, y] of s.points) {
      if (!Number.isFinite(y)) { pen = false; continue; }
      pen ? ctx.lineTo(X(x), Y(y)) : ctx.moveTo(X(x), Y(y));
      pen = true;
    }
    ctx.stroke();
  }
  ctx.lineWidth = 1;

  ctx.fillStyle = "#c0392b";
  for (const [x, y] of dots) {
    ctx.beginPath();
    ctx.arc(X(x), Y(y), 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function renderSolve({ s, gamma, c, literal }, target) {
  const res = JSON.parse(solve(s, gamma, c, literal));
  const o = res.outcome;
  const chosen = o.candidates.find((k) => k.I_L === o.profile.I_L);
  plot(document.getElementById("objective"), [{ points: res.objective, color: "#1f5fbf" }], {
    vlines: [res.boundary],
    dots: chosen ? [[chosen.I_L, chosen.payoff]] : [],
  });
  target.innerHTML = table([
    ["outcome", o.regime],
    ["I_L", fmt(o.profile.I_L)],
    ["I_F", fmt(o.profile.I_F)],
    ["p_L", fmt(o.profile.p_L)],
    ["p_F", fmt(o.profile.p_F)],
    ["n_L", fmt(o.split.n_L)],
    ["π_L", fmt(o.payoffs.pi_L)],
    ["π_F", fmt(o.payoffs.pi_F)],
    ["warnings", o.warnings.join(", ") || "none"],
  ]);
}

function renderSweep({ gamma, c, literal }, target) {
  const rep = JSON.parse(sweep(gamma, c, 0.01, 2.0, 0.01, literal));
  const rows = rep.rows;
  const shade = [];
  let start = null;
  rows.forEach((r, i) => {
    if (r.regime === "A" && start === null) start = r.s;
    if (start !== null && (r.regime !== "A" || i === rows.length - 1)) {
      shade.push([start, r.s]);
      start = null;
    }
  });
  plot(document.getElementById("investments"), [
    { points: rows.map((r) => [r.s, r.I_L]), color: "#1f5fbf" },
    { points: rows.map((r) => [r.s, r.I_F]), color: "#e67e22" },
  ], { shade });
  const switches = rep.transitions.map((i) => `${rows[i - 1].regime}→${rows[i].regime} at s = ${rows[i].s}`);
  target.innerHTML = `<p>${rows.length} fees from s = ${rows[0].s} to ${rows[rows.length - 1].s}; ${
    switches.length ? switches.join("; ") : "no outcome switch"
  }.</p>`;
}

function renderBenchmark({ tl, s, gamma, c }, target) {
  const tf = Math.round((1 - tl) * 1e12) / 1e12;
  const res = JSON.parse(benchmark(tl, tf, c, s, gamma));
  const b = res.benchmark;
  target.innerHTML = table([
    ["t_L, t_F", `${fmt(res.params.t_L, 9)}, ${fmt(res.params.t_F, 9)}${res.limit ? " (limit)" : ""}`],
    ["p_L, p_F", `${fmt(b.p_L)}, ${fmt(b.p_F)}`],
    ["n_L, n_F", `${fmt(b.n_L)}, ${fmt(b.n_F)}`],
    ["π_L, π_F (benchmark)", `${fmt(b.pi_L)}, ${fmt(b.pi_F)}`],
    ["π_L with leasing", fmt(res.spne_leader_payoff)],
    ["incentive gap", fmt(res.incentive_gap)],
  ]);
}

await init();
bind("solve", renderSolve);
bind("sweep", renderSweep);
bind("benchmark", renderBenchmark);
