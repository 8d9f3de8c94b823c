/** Scatter view: one heat-map thumbnail per attribute, in vertex order. */

import { Store } from "../state.js";

export function mountAttributeStrip(root: HTMLElement, store: Store): void {
  root.innerHTML = `
    <h2>Attribute maps</h2>
    <div id="strip" class="strip"></div>
    <div id="strip-zoom" class="zoom" hidden></div>
  `;
  const strip = root.querySelector<HTMLDivElement>("#strip")!;
  const zoom = root.querySelector<HTMLDivElement>("#strip-zoom")!;
  zoom.addEventListener("click", () => {
    zoom.hidden = true;
    zoom.innerHTML = "";
  });

  let renderedEpoch = -1;
  let renderedOrder = "";

  store.subscribe(() => {
    const legend = store.legend;
    if (!store.sessionId || !legend) return;
    const order = legend.vertices.map((v) => v.name).join("|");
    // thumbnails depend on the attribute epoch (kernel/grid/lightness), not the warp
    if (store.attributeEpoch === renderedEpoch && order === renderedOrder) return;
    renderedEpoch = store.attributeEpoch;
    renderedOrder = order;

    strip.innerHTML = "";
    for (const v of legend.vertices) {
      const url = store.client.attributeUrl(store.sessionId, v.name, store.attributeEpoch);
      const tile = document.createElement("figure");
      tile.className = "tile";
      const img = document.createElement("img");
      img.alt = `${v.name} heat map`;
      img.src = url;
      img.addEventListener("click", () => {
        zoom.innerHTML = `<img src="${url}" alt="${v.name} heat map, enlarged"><div>${v.name}</div>`;
        zoom.hidden = false;
      });
      img.addEventListener("error", () => {
        tile.classList.add("failed");
        const retry = document.createElement("button");
        retry.textContent = `retry ${v.name}`;
        retry.addEventListener("click", () => {
          tile.classList.remove("failed");
          retry.remove();
          img.src = `${url}&retry=${Date.now()}`;
        });
        tile.append(retry);
      });
      const caption = document.createElement("figcaption");
      caption.innerHTML = `<span class="swatch" style="background:${v.hex}"></span>${v.name}`;
      tile.append(img, caption);
      strip.append(tile);
    }
  });
}
