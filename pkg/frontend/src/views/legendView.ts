/** Color legend: the painted HS wheel with vertices, samples, and the
 * PCA ellipse, plus the selected sample's bar chart of true values. */

import { discColor, rgbHex } from "../color.js";
import { Store } from "../state.js";

const SIZE = 340;
const HALF_SPAN = 1.18; // disc units per half-canvas, room for labels

function toPx(v: number): number {
  return ((v + HALF_SPAN) / (2 * HALF_SPAN)) * SIZE;
}

export function mountLegendView(root: HTMLElement, store: Store): void {
  root.innerHTML = `
    <h2>Color legend</h2>
    <canvas id="legend-canvas" width="${SIZE}" height="${SIZE}"></canvas>
    <div id="legend-bars" class="bars"></div>
  `;
  const canvas = root.querySelector<HTMLCanvasElement>("#legend-canvas")!;
  const bars = root.querySelector<HTMLDivElement>("#legend-bars")!;

  store.subscribe(() => {
    const legend = store.legend;
    if (!legend) return;
    const ctx = canvas.getContext("2d");
    if (!ctx) return;

    const lightness = legend.disc.lightness;
    const image = ctx.createImageData(SIZE, SIZE);
    for (let row = 0; row < SIZE; row += 1) {
      const y = HALF_SPAN - ((row + 0.5) / SIZE) * 2 * HALF_SPAN;
      for (let col = 0; col < SIZE; col += 1) {
        const x = ((col + 0.5) / SIZE) * 2 * HALF_SPAN - HALF_SPAN;
        const i = (row * SIZE + col) * 4;
        if (Math.hypot(x, y) <= 1) {
          const [r, g, b] = discColor(x, y, lightness);
          image.data[i] = r;
          image.data[i + 1] = g;
          image.data[i + 2] = b;
        } else {
          image.data[i] = image.data[i + 1] = image.data[i + 2] = 255;
        }
        image.data[i + 3] = 255;
      }
    }
    ctx.putImageData(image, 0, 0);

    // ellipse outline
    ctx.strokeStyle = "#3c3c3c";
    ctx.lineWidth = 1;
    ctx.beginPath();
    legend.ellipse_outline.forEach(([x, y], k) => {
      if (k === 0) ctx.moveTo(toPx(x), SIZE - toPx(y));
      else ctx.lineTo(toPx(x), SIZE - toPx(y));
    });
    ctx.stroke();

    // warped samples, colored as on the map
    legend.points.forEach(([x, y], i) => {
      ctx.fillStyle = legend.colors[i].hex;
      ctx.beginPath();
      ctx.arc(toPx(x), SIZE - toPx(y), 2.2, 0, 2 * Math.PI);
      ctx.fill();
    });

    // attribute vertices on the rim
    ctx.font = "11px sans-serif";
    for (const v of legend.vertices) {
      const vx = Math.cos(v.angle);
      const vy = Math.sin(v.angle);
      ctx.fillStyle = v.hex;
      ctx.strokeStyle = "#000";
      ctx.beginPath();
      ctx.arc(toPx(vx), SIZE - toPx(vy), 5, 0, 2 * Math.PI);
      ctx.fill();
      ctx.stroke();
      ctx.fillStyle = "#000";
      const lx = toPx(vx * 1.1);
      const ly = SIZE - toPx(vy * 1.1);
      ctx.textAlign = vx > 0.05 ? "left" : vx < -0.05 ? "right" : "center";
      ctx.textBaseline = "middle";
      ctx.fillText(v.name, lx, ly);
    }

    // selected sample: ring marker in the legend
    const pos = store.legendMarkerPosition;
    if (pos && store.legendMarkerHex) {
      ctx.strokeStyle = "#000";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(toPx(pos[0]), SIZE - toPx(pos[1]), 6, 0, 2 * Math.PI);
      ctx.stroke();
      ctx.fillStyle = store.legendMarkerHex;
      ctx.beginPath();
      ctx.arc(toPx(pos[0]), SIZE - toPx(pos[1]), 4.5, 0, 2 * Math.PI);
      ctx.fill();
    }

    renderBars(bars, store);
  });
}

function renderBars(bars: HTMLDivElement, store: Store): void {
  const sel = store.selected;
  const legend = store.legend;
  if (!sel || !legend) {
    bars.innerHTML = `<div class="hint">no sample selected</div>`;
    return;
  }
  const byIndex = new Map(legend.vertices.map((v) => [v.name, v.hex]));
  const entries = Object.entries(sel.values);
  const top = Math.max(...entries.map(([, v]) => v), 1e-12);
  const rows = entries
    .map(([name, value]) => {
      const hex = byIndex.get(name) ?? "#888888";
      const w = Math.max((value / top) * 100, 0.5);
      return `
        <div class="bar-row">
          <span class="bar-name">${name}</span>
          <span class="bar-track"><span class="bar-fill" style="width:${w.toFixed(1)}%;background:${hex}"></span></span>
          <span class="bar-val">${value.toFixed(2)}</span>
        </div>`;
    })
    .join("");
  bars.innerHTML = `
    <div class="bar-head">
      <span class="swatch" style="background:${store.barSwatchHex ?? "#fff"}"></span>
      sample ${sel.index} — total weight ${sel.weight.toFixed(2)}
    </div>
    ${rows}`;
}

export { rgbHex };
