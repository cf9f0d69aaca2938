import init, { branch_raster, eta_curve, stability_report } from "./pkg/tetrastab_demo.js";

const $ = (id) => document.getElementById(id);

function params() {
  return {
    model: $("model").value,
    mu: Number($("mu").value),
    mu1: Number($("mu1").value),
    lmax: Number($("lmax").value),
    epsilon: Number($("epsilon").value),
  };
}

function diverging(t) {
  // t in [-1, 1] -> blue / white / red
  const s = Math.min(1, Math.abs(t));
  const fade = Math.round(255 * (1 - s));
  return t < 0 ? [fade, fade, 255] : [255, fade, fade];
}

function drawRaster(p) {
  const canvas = $("raster");
  const [w, h] = [canvas.width, canvas.height];
  const nLat = 128, nLon = 256;
  const v = branch_raster(p.model, p.mu, p.mu1, p.lmax, p.epsilon, nLat, nLon);
  const scale = v.reduce((m, x) => Math.max(m, Math.abs(x)), 1e-300);
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(nLon, nLat);
  v.forEach((x, k) => {
    const [r, g, b] = diverging(x / scale);
    img.data.set([r, g, b, 255], 4 * k);
  });
  const tmp = new OffscreenCanvas(nLon, nLat);
  tmp.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = true;
  ctx.drawImage(tmp, 0, 0, w, h);
}

function drawCurve(p) {
  const canvas = $("curve");
  const ctx = canvas.getContext("2d");
  const [w, h] = [canvas.width, canvas.height];
  const epsMax = Math.max(p.epsilon, 0.05);
  const flat = eta_curve(p.model, p.mu, p.mu1, p.lmax, epsMax, 24);
  const pts = [];
  for (let k = 0; k < flat.length; k += 3) pts.push(flat.slice(k, k + 3));
  const ymax = pts.reduce((m, q) => Math.max(m, Math.abs(q[1]), Math.abs(q[2])), 1e-300);
  const X = (e) => 40 + (w - 60) * e / epsMax;
  const Y = (y) => h / 2 - (h / 2 - 20) * y / ymax;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath(); ctx.moveTo(40, h / 2); ctx.lineTo(w - 20, h / 2); ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.fillText(ymax.toExponential(2), 2, 24);
  ctx.fillText((-ymax).toExponential(2), 2, h - 16);
  ctx.fillText(epsMax.toFixed(2), w - 40, h / 2 + 14);
  const line = (idx, dash, color) => {
    ctx.setLineDash(dash);
    ctx.strokeStyle = color;
    ctx.beginPath();
    ctx.moveTo(X(0), Y(0));
    pts.forEach((q) => ctx.lineTo(X(q[0]), Y(q[idx])));
    ctx.stroke();
  };
  line(1, [], "#1f5fbf");
  line(2, [6, 4], "#bf3f1f");
  ctx.setLineDash([]);
}

function showReport(p) {
  const r = JSON.parse(stability_report(p.model, p.mu, p.mu1, p.lmax));
  $("report").textContent = JSON.stringify(r, null, 2);
}

function update() {
  const p = params();
  $("epsilon-out").textContent = p.epsilon.toFixed(2);
  $("mu").disabled = $("mu1").disabled = p.model !== "polynomial";
  $("error").textContent = "";
  for (const step of [showReport, drawRaster, drawCurve]) {
    try {
      step(p);
    } catch (e) {
      $("error").textContent = String(e.message ?? e);
    }
  }
}

await init();
$("controls").addEventListener("input", update);
update();
