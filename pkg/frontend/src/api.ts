/** Thin typed client for the documented HTTP surface; no private endpoints. */

import type {
  ConfigResponse,
  LayoutPayload,
  LegendPayload,
  SamplePayload,
  SessionConfig,
  SessionCreated,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      /* body was not JSON */
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}/api/v1${path}`;
  }

  async createSession(csvBytes: BlobPart, filename: string): Promise<SessionCreated> {
    const form = new FormData();
    form.append("file", new Blob([csvBytes], { type: "text/csv" }), filename);
    const resp = await fetch(this.url("/sessions"), { method: "POST", body: form });
    return asJson<SessionCreated>(resp);
  }

  async getConfig(id: string): Promise<ConfigResponse> {
    return asJson(await fetch(this.url(`/sessions/${id}/config`)));
  }

  async patchConfig(id: string, changes: Partial<SessionConfig>): Promise<ConfigResponse> {
    const resp = await fetch(this.url(`/sessions/${id}/config`), {
      method: "PATCH",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(changes),
    });
    return asJson<ConfigResponse>(resp);
  }

  async getLayout(id: string): Promise<LayoutPayload> {
    return asJson(await fetch(this.url(`/sessions/${id}/layout`)));
  }

  async getLegend(id: string): Promise<LegendPayload> {
    return asJson(await fetch(this.url(`/sessions/${id}/legend`)));
  }

  async getSample(id: string, index: number): Promise<SamplePayload> {
    return asJson(await fetch(this.url(`/sessions/${id}/samples/${index}`)));
  }

  async getNearest(id: string, x: number, y: number): Promise<SamplePayload> {
    const q = new URLSearchParams({ x: String(x), y: String(y) });
    return asJson(await fetch(this.url(`/sessions/${id}/samples/nearest?${q}`)));
  }

  /** Cache-busted by config version so the browser never shows a stale frame. */
  renderUrl(id: string, version: number): string {
    return this.url(`/sessions/${id}/render?v=${version}`);
  }

  attributeUrl(id: string, name: string, epoch: number): string {
    return this.url(`/sessions/${id}/render/attribute/${encodeURIComponent(name)}?v=${epoch}`);
  }

  /** Fetch the rendered map; returns the config version the server stamped. */
  async fetchRender(id: string, version: number): Promise<{ bytes: ArrayBuffer; version: number }> {
    const resp = await fetch(this.renderUrl(id, version));
    if (!resp.ok) throw new ApiError(resp.status, resp.statusText);
    const stamped = Number(resp.headers.get("x-config-version") ?? version);
    return { bytes: await resp.arrayBuffer(), version: stamped };
  }

  async deleteSession(id: string): Promise<void> {
    await fetch(this.url(`/sessions/${id}`), { method: "DELETE" });
  }
}
