import init, { corpusPreview, tTestExplorer, auditPredictions, examplePredictions } from "./pkg/occbias_web.js";

const $ = (id) => document.getElementById(id);
const fmt = (x, d = 3) => (typeof x === "number" ? x.toFixed(d) : String(x));
const fmtP = (p) => (p < 1e-4 ? p.toExponential(2) : p.toFixed(4));
const esc = (s) => String(s).replace(/[&<>"]/g, (c) => ({ "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;" })[c]);

function attempt(errId, fn) {
  $(errId).textContent = "";
  try {
    fn();
  } catch (e) {
    $(errId).textContent = String(e);
  }
}

// Corpus preview

let corpus = null;

function renderCorpus() {
  if (!corpus) return;
  const needle = $("filter").value.trim().toLowerCase();
  const rows = corpus.main.concat(corpus.control).filter((r) => !needle || r.text.toLowerCase().includes(needle) || r.id.includes(needle));
  $("corpus-count").textContent = `${corpus.main.length} main + ${corpus.control.length} control sentences, ${rows.length} shown`;
  $("corpus-table").innerHTML =
    "<tr><th>id</th><th>gender</th><th>sentence</th></tr>" +
    rows.map((r) => `<tr><td>${esc(r.id)}</td><td>${esc(r.gender)}</td><td>${esc(r.text)}</td></tr>`).join("");
}

function generate() {
  attempt("corpus-err", () => {
    corpus = JSON.parse(corpusPreview($("pairs").value, $("professions").value));
    renderCorpus();
  });
}

// Plot helpers

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(pad, h - pad);
  ctx.lineTo(w - pad, h - pad);
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, h - pad);
  ctx.stroke();
  ctx.fillStyle = "#222";
  ctx.font = "11px sans-serif";
}

function drawDensity(r) {
  const cv = $("density");
  const ctx = cv.getContext("2d");
  const pad = 30;
  const { width: w, height: h } = cv;
  axes(ctx, w, h, pad);
  const xs = r.curve_x;
  const ys = r.curve_density;
  const x0 = xs[0];
  const x1 = xs[xs.length - 1];
  const ymax = Math.max(...ys) * 1.1;
  const px = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (y) => h - pad - (y / ymax) * (h - 2 * pad);

  ctx.strokeStyle = "#36c";
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(ys[i])) : ctx.moveTo(px(x), py(ys[i]))));
  ctx.stroke();

  for (let v = Math.ceil(x0); v <= x1; v++) ctx.fillText(String(v), px(v) - 3, h - pad + 14);

  const tx = r.t === null ? (r.mean_difference >= 0 ? x1 : x0) : Math.max(x0, Math.min(x1, r.t));
  ctx.strokeStyle = r.reject ? "#c33" : "#393";
  ctx.beginPath();
  ctx.moveTo(px(tx), pad);
  ctx.lineTo(px(tx), h - pad);
  ctx.stroke();
  ctx.fillText(r.t === null ? "t = ±inf" : `t = ${fmt(r.t)}`, px(tx) + 4, pad + 10);
}

function runTest() {
  attempt("ttest-err", () => {
    const r = JSON.parse(tTestExplorer($("diffs").value, Number($("alpha").value), Number($("m").value)));
    $("ttest-out").innerHTML =
      `n = ${r.n}, mean difference = ${fmt(r.mean_difference, 4)}, t = ${r.t === null ? "±inf" : fmt(r.t)}, df = ${r.df}<br>` +
      `p = ${fmtP(r.p_two_sided)}, Bonferroni-adjusted p = ${fmtP(r.adjusted_p)}, threshold alpha/m = ${r.threshold.toPrecision(3)}<br>` +
      `<b>${r.reject ? "reject" : "do not reject"}</b> the null of zero mean difference`;
    drawDensity(r);
  });
}

// Audit

function drawGaps(model) {
  const cv = $("gaps");
  const ctx = cv.getContext("2d");
  const pad = 30;
  const left = 140;
  const { width: w, height: h } = cv;
  ctx.clearRect(0, 0, w, h);
  ctx.font = "11px sans-serif";
  const gaps = model.profession_gaps;
  const maxAbs = Math.max(0.01, ...gaps.map((g) => Math.abs(g.f_minus_m)));
  const mid = left + (w - left - pad) / 2;
  const scale = (w - left - pad) / 2 / maxAbs;
  const rowH = (h - pad) / gaps.length;
  ctx.fillStyle = "#222";
  ctx.fillText("female - male mean probability per profession", left, 12);
  gaps.forEach((g, i) => {
    const y = pad / 2 + i * rowH;
    ctx.fillStyle = "#222";
    ctx.fillText(g.key, 4, y + rowH * 0.75);
    ctx.fillStyle = g.f_minus_m < 0 ? "#c66" : "#69c";
    const x = mid + Math.min(0, g.f_minus_m) * scale;
    ctx.fillRect(x, y + 2, Math.abs(g.f_minus_m) * scale, rowH - 4);
  });
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(mid, pad / 2);
  ctx.lineTo(mid, h - pad / 2);
  ctx.stroke();
}

function drawScatter(model) {
  const cv = $("scatter");
  const ctx = cv.getContext("2d");
  const pad = 40;
  const { width: w, height: h } = cv;
  axes(ctx, w, h, pad);
  if (!model.earnings) return;
  const pts = model.earnings.scatter;
  const ex = pts.map((p) => p.median_weekly_earnings);
  const ey = pts.map((p) => p.mean_probability);
  const [xl, xh] = [Math.min(...ex), Math.max(...ex)];
  const [yl, yh] = [Math.min(...ey), Math.max(...ey)];
  const px = (x) => pad + ((x - xl) / (xh - xl || 1)) * (w - 2 * pad);
  const py = (y) => h - pad - ((y - yl) / (yh - yl || 1)) * (h - 2 * pad);
  ctx.fillText(`median weekly earnings (USD) vs mean probability, r = ${fmt(model.earnings.r)}`, pad, 14);
  ctx.fillText(`$${xl}`, pad, h - pad + 14);
  ctx.fillText(`$${xh}`, w - pad - 30, h - pad + 14);
  pts.forEach((p) => {
    ctx.fillStyle = "#36c";
    ctx.beginPath();
    ctx.arc(px(p.median_weekly_earnings), py(p.mean_probability), 3, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#444";
    ctx.fillText(p.profession, px(p.median_weekly_earnings) + 5, py(p.mean_probability) - 3);
  });
}

function gapRow(g) {
  return `<tr><td>${esc(g.key)}</td><td class="num">${fmt(g.f_minus_m)}</td><td class="num">${g.test.t_statistic === null || typeof g.test.t_statistic !== "number" ? "±inf" : fmt(g.test.t_statistic, 2)}</td><td class="num">${fmtP(g.test.p_two_sided)}</td></tr>`;
}

function runAudit() {
  attempt("audit-err", () => {
    const doc = JSON.parse(auditPredictions($("jsonl").value, Number($("audit-alpha").value), Number($("audit-m").value)));
    const model = doc.models[0];
    const o = model.overall;
    const means = model.profession_means;
    const ctl = model.control
      ? `Control ("... is a person."): F - M = ${fmt(model.control.f_minus_m)}, p = ${fmtP(model.control.test.p_two_sided)}`
      : "Control sentences not supplied.";
    $("audit-out").innerHTML =
      `<p><b>Overall F - M = ${fmt(o.f_minus_m)}${o.reject ? "**" : ""}</b> (t = ${typeof o.test.t_statistic === "number" ? fmt(o.test.t_statistic, 2) : "±inf"}, ` +
      `p = ${fmtP(o.test.p_two_sided)}, adjusted p = ${fmtP(o.adjusted_p)}, ${o.reject ? "significant" : "not significant"} at alpha/m = ${(doc.family.alpha / doc.family.m).toPrecision(3)})</p>` +
      `<p>Most positive: ${means.slice(0, 3).map((m) => `${esc(m.profession)} (${fmt(m.mean_probability)})`).join(", ")}. ` +
      `Least positive: ${means.slice(-3).reverse().map((m) => `${esc(m.profession)} (${fmt(m.mean_probability)})`).join(", ")}.</p>` +
      `<p>${ctl}</p>` +
      `<div class="scroll"><table><tr><th>noun pair</th><th>F - M</th><th>t</th><th>p (uncorrected)</th></tr>${model.pair_gaps.map(gapRow).join("")}</table></div>` +
      (doc.notes.length ? `<p>${doc.notes.map(esc).join("<br>")}</p>` : "");
    drawGaps(model);
    drawScatter(model);
  });
}

await init();
$("gen").onclick = generate;
$("filter").oninput = renderCorpus;
$("test").onclick = runTest;
$("example").onclick = () => ($("jsonl").value = examplePredictions());
$("run-audit").onclick = runAudit;
generate();
runTest();
