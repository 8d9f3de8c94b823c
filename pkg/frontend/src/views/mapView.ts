/** Pseudo-coloring plot: the rendered map with click picking. */

import { Store } from "../state.js";

export function mountMapView(root: HTMLElement, store: Store): void {
  root.innerHTML = `
    <h2>Pseudo-coloring plot</h2>
    <div class="map-frame">
      <img id="map-img" alt="pseudo-colored map" draggable="false">
      <div id="map-marker" class="marker" hidden></div>
      <div id="map-stale" class="stale-badge" hidden>rendering…</div>
    </div>
    <div id="map-hint" class="hint">click the map to inspect the nearest sensor</div>
  `;
  const img = root.querySelector<HTMLImageElement>("#map-img")!;
  const marker = root.querySelector<HTMLDivElement>("#map-marker")!;
  const stale = root.querySelector<HTMLDivElement>("#map-stale")!;

  let objectUrl: string | null = null;

  img.addEventListener("click", (ev) => {
    if (!store.sessionId || !store.extent) return;
    const rect = img.getBoundingClientRect();
    const fx = (ev.clientX - rect.left) / rect.width;
    const fy = (ev.clientY - rect.top) / rect.height;
    const coords = store.datasetCoords(fx, fy);
    if (coords) void store.pick(coords[0], coords[1]);
  });

  store.subscribe(() => {
    if (store.renderBytes) {
      const next = URL.createObjectURL(new Blob([store.renderBytes], { type: "image/png" }));
      img.src = next;
      if (objectUrl) URL.revokeObjectURL(objectUrl);
      objectUrl = next;
    }
    stale.hidden = store.settled;

    const sel = store.selected;
    if (sel && store.extent) {
      const [x0, y0, x1, y1] = store.extent;
      const fx = (sel.location[0] - x0) / (x1 - x0);
      const fy = (y1 - sel.location[1]) / (y1 - y0);
      marker.style.left = `${(fx * 100).toFixed(2)}%`;
      marker.style.top = `${(fy * 100).toFixed(2)}%`;
      marker.style.background = store.mapMarkerHex ?? "transparent";
      marker.title = `sample ${sel.index} ${store.mapMarkerHex ?? ""}`;
      marker.hidden = false;
    } else {
      marker.hidden = true;
    }
  });
}
