/** Parameter controls: warp mode, ellipse scale, lightness, intensity, shrink. */

import { Store, validateChanges } from "../state.js";
import type { WarpModeName } from "../types.js";

const MODES: { value: WarpModeName; label: string }[] = [
  { value: "none", label: "original coloring" },
  { value: "color_preserving", label: "color preserving enhancement" },
  { value: "contrast_enhancement", label: "contrast enhancement" },
  { value: "comparison_compression", label: "comparison compression" },
];

export function mountConfigPanel(root: HTMLElement, store: Store): void {
  root.innerHTML = `
    <h2>Configuration</h2>
    <label class="field">Feature extraction
      <select id="cfg-mode">
        ${MODES.map((m) => `<option value="${m.value}">${m.label}</option>`).join("")}
      </select>
    </label>
    <label class="field">Ellipse scale <span id="cfg-scale-val"></span>
      <input id="cfg-scale" type="range" min="0.5" max="4" step="0.05">
    </label>
    <label class="field">Lightness <span id="cfg-light-val"></span>
      <input id="cfg-light" type="range" min="0.2" max="0.9" step="0.01">
    </label>
    <label class="field">Compression shrink <span id="cfg-shrink-val"></span>
      <input id="cfg-shrink" type="range" min="0.05" max="1" step="0.05">
    </label>
    <label class="field check">
      <input id="cfg-intensity" type="checkbox"> weight to intensity
    </label>
    <div id="cfg-error" class="error" hidden></div>
  `;

  const mode = root.querySelector<HTMLSelectElement>("#cfg-mode")!;
  const scale = root.querySelector<HTMLInputElement>("#cfg-scale")!;
  const light = root.querySelector<HTMLInputElement>("#cfg-light")!;
  const shrink = root.querySelector<HTMLInputElement>("#cfg-shrink")!;
  const intensity = root.querySelector<HTMLInputElement>("#cfg-intensity")!;
  const errorBox = root.querySelector<HTMLDivElement>("#cfg-error")!;

  mode.addEventListener("change", () => {
    store.updateConfig({ warp_mode: mode.value as WarpModeName });
  });
  scale.addEventListener("input", () => {
    store.updateConfig({ ellipse_scale_k: Number(scale.value) });
  });
  light.addEventListener("input", () => {
    store.updateConfig({ lightness: Number(light.value) });
  });
  shrink.addEventListener("input", () => {
    const value = Number(shrink.value);
    const problem = validateChanges({ shrink: value });
    if (problem) {
      errorBox.hidden = false;
      errorBox.textContent = problem;
      return;
    }
    store.updateConfig({ shrink: value });
  });
  intensity.addEventListener("change", () => {
    store.updateConfig({ intensity_on: intensity.checked });
  });

  store.subscribe(() => {
    const cfg = store.config;
    if (!cfg) return;
    if (document.activeElement !== mode) mode.value = cfg.warp_mode;
    if (document.activeElement !== scale) scale.value = String(cfg.ellipse_scale_k);
    if (document.activeElement !== light) light.value = String(cfg.lightness);
    if (document.activeElement !== shrink) shrink.value = String(cfg.shrink);
    intensity.checked = cfg.intensity_on;
    root.querySelector("#cfg-scale-val")!.textContent = Number(scale.value).toFixed(2);
    root.querySelector("#cfg-light-val")!.textContent = Number(light.value).toFixed(2);
    root.querySelector("#cfg-shrink-val")!.textContent = Number(shrink.value).toFixed(2);
    errorBox.hidden = !store.error;
    if (store.error) errorBox.textContent = store.error;
    for (const el of [mode, scale, light, shrink, intensity]) {
      el.disabled = store.renderInFlight;
    }
  });
}
