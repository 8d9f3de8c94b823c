/** Entry point: wire the store to the four panels and the file picker. */

import { ApiClient } from "./api.js";
import { Store } from "./state.js";
import { mountAttributeStrip } from "./views/attributeStrip.js";
import { mountConfigPanel } from "./views/configPanel.js";
import { mountLegendView } from "./views/legendView.js";
import { mountMapView } from "./views/mapView.js";

function must(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

const store = new Store(new ApiClient(""));

mountConfigPanel(must("panel-config"), store);
mountMapView(must("panel-map"), store);
mountLegendView(must("panel-legend"), store);
mountAttributeStrip(must("panel-strip"), store);

const picker = must("file-picker") as HTMLInputElement;
picker.addEventListener("change", async () => {
  const file = picker.files?.[0];
  if (!file) return;
  const status = must("load-status");
  status.textContent = `loading ${file.name}…`;
  try {
    await store.open(await file.arrayBuffer(), file.name);
    status.textContent = `${file.name}: ${store.sampleCount} samples, ${store.attributes.length} attributes`;
  } catch (err) {
    status.textContent = `failed to load: ${err}`;
  }
});
