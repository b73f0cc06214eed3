import init, { angle_density, spacing_distribution, eta_coefficients } from "./pkg/sato_tate_web.js";

const BAR = "#8fb3de";
const MODEL = "#c0392b";

function fmt(x, digits = 4) {
  return Number.isFinite(x) ? x.toFixed(digits) : "n/a";
}

// Bars from `hist.edges`/`hist.density`, model curve from `curve` [[x, y], ...].
function plot(canvas, hist, curve, xLabel) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height;
  const pad = { left: 48, right: 12, top: 12, bottom: 34 };
  ctx.clearRect(0, 0, w, h);

  const x0 = hist.edges[0], x1 = hist.edges[hist.edges.length - 1];
  const yMax = 1.1 * Math.max(...hist.density, ...curve.map(p => p[1]));
  const sx = x => pad.left + (x - x0) / (x1 - x0) * (w - pad.left - pad.right);
  const sy = y => h - pad.bottom - y / yMax * (h - pad.top - pad.bottom);

  ctx.fillStyle = BAR;
  hist.density.forEach((d, i) => {
    const a = sx(hist.edges[i]), b = sx(hist.edges[i + 1]);
    ctx.fillRect(a + 0.5, sy(d), Math.max(b - a - 1, 1), sy(0) - sy(d));
  });

  ctx.strokeStyle = MODEL;
  ctx.lineWidth = 2;
  ctx.beginPath();
  curve.forEach(([x, y], i) => (i ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
  ctx.stroke();

  ctx.strokeStyle = "#444";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(pad.left, pad.top);
  ctx.lineTo(pad.left, sy(0));
  ctx.lineTo(w - pad.right, sy(0));
  ctx.stroke();

  ctx.fillStyle = "#444";
  ctx.font = "12px system-ui, sans-serif";
  ctx.textAlign = "center";
  for (let i = 0; i <= 5; i++) {
    const x = x0 + (x1 - x0) * i / 5;
    ctx.fillText(x.toFixed(2), sx(x), h - pad.bottom + 15);
  }
  ctx.fillText(xLabel, (pad.left + w - pad.right) / 2, h - 4);
  ctx.textAlign = "right";
  for (let i = 0; i <= 4; i++) {
    const y = yMax * i / 4;
    ctx.fillText(y.toFixed(2), pad.left - 6, sy(y) + 4);
  }
}

function showError(el, err) {
  el.textContent = String(err);
  el.classList.add("error");
}

function run(formId, statsId, action) {
  const form = document.getElementById(formId);
  const stats = document.getElementById(statsId);
  const go = () => {
    stats.classList.remove("error");
    stats.textContent = "computing...";
    // let the label paint before the synchronous wasm call
    setTimeout(() => {
      try {
        stats.textContent = action(new FormData(form));
      } catch (err) {
        showError(stats, err);
      }
    }, 10);
  };
  form.addEventListener("submit", e => { e.preventDefault(); go(); });
  go();
}

function angles(data) {
  const v = JSON.parse(angle_density(data.get("preset"), +data.get("primes"), +data.get("bins")));
  plot(document.getElementById("angles-canvas"), v.histogram, v.curve, "θ");
  const c = v.chi_square, u = v.uniformity_ks;
  return [
    `${v.label}: M = ${v.sample_size} primes up to ${v.prime_limit}`,
    `chi-square ${fmt(c.statistic, 3)} on ${v.dof} dof (5%: ${fmt(c.critical_5pct, 3)}, 1%: ${fmt(c.critical_1pct, 3)})`,
    `unfolded KS D = ${fmt(u.statistic, 5)} (5%: ${fmt(u.critical_5pct, 5)}, 1%: ${fmt(u.critical_1pct, 5)})`,
  ].join("\n");
}

function spacing(data) {
  const k = +data.get("k");
  const v = JSON.parse(spacing_distribution(data.get("preset"), +data.get("primes"), k, +data.get("bins")));
  plot(document.getElementById("spacing-canvas"), v.histogram, v.curve, `s (k = ${k})`);
  return [
    `${v.label}: ${v.spacings} spacings from M = ${v.sample_size}`,
    `KS D = ${fmt(v.ks.statistic, 5)} (5%: ${fmt(v.ks.critical_5pct, 5)}, 1%: ${fmt(v.ks.critical_1pct, 5)})`,
    `mean ${fmt(v.mean)} (expected ${k + 1} ± ${fmt(v.mean_tolerance)})`,
  ].join("\n");
}

function coefficients(data) {
  const v = JSON.parse(eta_coefficients(data.get("factors"), data.get("bad"), +data.get("count")));
  const table = document.getElementById("coeff-table");
  table.replaceChildren();
  const head = table.insertRow();
  for (const t of ["n", "a_n", "bound at prime"]) {
    const th = document.createElement("th");
    th.textContent = t;
    head.appendChild(th);
  }
  for (const r of v.rows) {
    const row = table.insertRow();
    if (r.prime) row.className = "prime";
    const bound = r.within_bound === null ? (r.prime ? "bad prime" : "") : (r.within_bound ? "ok" : "VIOLATED");
    for (const t of [r.n, r.a_n, bound]) row.insertCell().textContent = t;
  }
  return `${v.label}: weight ${v.weight}, expansion starts at q^${v.leading_power}`;
}

await init();
run("angles-form", "angles-stats", angles);
run("spacing-form", "spacing-stats", spacing);
run("coeff-form", "coeff-stats", coefficients);
