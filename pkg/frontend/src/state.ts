/** Headless view-model: config mirror, render versioning, selection.
 *
 * Invariants enforced here, independent of any DOM:
 * - the config mirror always equals the last server-acknowledged config;
 * - at most one render request is in flight, slider changes are debounced;
 * - responses are applied in config-version order, stale ones discarded, so
 *   the displayed render version always equals the acknowledged version once
 *   the pipeline settles;
 * - every surface showing the selected sample's color reads it through one
 *   pair of selectors backed by the documented endpoints.
 */

import { ApiClient, ApiError } from "./api.js";
import type {
  Extent,
  LayoutPayload,
  LegendPayload,
  SamplePayload,
  SessionConfig,
} from "./types.js";

export interface StoreOptions {
  debounceMs?: number;
}

export type Listener = () => void;

/** Client-side bounds; an out-of-range value never produces a request. */
export function validateChanges(changes: Partial<SessionConfig>): string | null {
  if (changes.shrink !== undefined && !(changes.shrink > 0 && changes.shrink <= 1)) {
    return "shrink must be in (0, 1]";
  }
  if (changes.percentile !== undefined && !(changes.percentile > 0 && changes.percentile < 1)) {
    return "percentile must be in (0, 1)";
  }
  if (changes.lightness !== undefined && !(changes.lightness >= 0 && changes.lightness <= 1)) {
    return "lightness must be in [0, 1]";
  }
  if (changes.ellipse_scale_k !== undefined && !(changes.ellipse_scale_k > 0)) {
    return "ellipse scale must be positive";
  }
  return null;
}

/** Attribute thumbnails depend on these fields only, never on the warp. */
function attributeKey(config: SessionConfig): string {
  return JSON.stringify({
    kernel: config.kernel,
    grid: config.grid,
    lightness: config.lightness,
    weight_mode: config.weight_mode,
  });
}

export class Store {
  readonly client: ApiClient;

  sessionId: string | null = null;
  attributes: string[] = [];
  sampleCount = 0;
  extent: Extent | null = null;

  config: SessionConfig | null = null;
  ackVersion = 0;

  legend: LegendPayload | null = null;
  layout: LayoutPayload | null = null;
  selected: SamplePayload | null = null;
  hover: { x: number; y: number } | null = null;
  error: string | null = null;

  renderInFlight = false;
  displayedRenderVersion: number | null = null;
  renderBytes: ArrayBuffer | null = null;

  attributeEpoch = 0;
  private attributeKeyCurrent = "";

  private pendingChanges: Partial<SessionConfig> = {};
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;
  private renderQueued = false;
  private readonly debounceMs: number;
  private listeners: Listener[] = [];

  constructor(client: ApiClient, opts: StoreOptions = {}) {
    this.client = client;
    this.debounceMs = opts.debounceMs ?? 150;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  /** Upload a CSV, adopt the new session, and fetch every dependent view. */
  async open(csvBytes: BlobPart, filename: string): Promise<void> {
    const created = await this.client.createSession(csvBytes, filename);
    this.sessionId = created.id;
    this.attributes = created.attributes;
    this.sampleCount = created.m;
    this.extent = created.extent;
    this.selected = null;
    this.error = null;
    const cfg = await this.client.getConfig(created.id);
    this.config = cfg.config;
    this.ackVersion = cfg.version;
    this.attributeKeyCurrent = attributeKey(cfg.config);
    this.attributeEpoch = 1;
    this.layout = await this.client.getLayout(created.id);
    this.legend = await this.client.getLegend(created.id);
    this.emit();
    await this.requestRender();
  }

  /** Debounced config mutation; invalid values surface inline and stop here. */
  updateConfig(changes: Partial<SessionConfig>): void {
    if (!this.sessionId) return;
    const problem = validateChanges(changes);
    if (problem) {
      this.error = problem;
      this.emit();
      return;
    }
    this.error = null;
    Object.assign(this.pendingChanges, changes);
    if (this.debounceTimer !== null) clearTimeout(this.debounceTimer);
    this.debounceTimer = setTimeout(() => {
      this.debounceTimer = null;
      void this.flushConfig();
    }, this.debounceMs);
    this.emit();
  }

  /** Send the merged pending changes now; used by tests and unload paths. */
  async flushConfig(): Promise<void> {
    if (!this.sessionId) return;
    const changes = this.pendingChanges;
    this.pendingChanges = {};
    if (this.debounceTimer !== null) {
      clearTimeout(this.debounceTimer);
      this.debounceTimer = null;
    }
    if (Object.keys(changes).length === 0) return;
    try {
      const ack = await this.client.patchConfig(this.sessionId, changes);
      this.config = ack.config;
      this.ackVersion = ack.version;
      const key = attributeKey(ack.config);
      if (key !== this.attributeKeyCurrent) {
        this.attributeKeyCurrent = key;
        this.attributeEpoch += 1;
      }
      this.emit();
      this.legend = await this.client.getLegend(this.sessionId);
      if (this.selected) {
        this.selected = await this.client.getSample(this.sessionId, this.selected.index);
      }
      this.emit();
      await this.requestRender();
    } catch (err) {
      this.error = err instanceof ApiError ? err.detail : String(err);
      this.emit();
    }
  }

  /** Fetch the map for the acknowledged version; reissue if it went stale. */
  async requestRender(): Promise<void> {
    if (!this.sessionId || !this.config) return;
    if (this.renderInFlight) {
      this.renderQueued = true;
      return;
    }
    this.renderInFlight = true;
    this.emit();
    const requested = this.ackVersion;
    try {
      const { bytes, version } = await this.client.fetchRender(this.sessionId, requested);
      if (version === this.ackVersion) {
        this.renderBytes = bytes;
        this.displayedRenderVersion = version;
      } else {
        this.renderQueued = true; // stale: a newer config was acknowledged
      }
    } catch (err) {
      this.error = err instanceof ApiError ? err.detail : String(err);
    } finally {
      this.renderInFlight = false;
      this.emit();
    }
    if (this.renderQueued) {
      this.renderQueued = false;
      await this.requestRender();
    }
  }

  /** The displayed frame is current: nothing pending, in flight, or stale. */
  get settled(): boolean {
    return (
      !this.renderInFlight &&
      !this.renderQueued &&
      this.debounceTimer === null &&
      Object.keys(this.pendingChanges).length === 0 &&
      this.displayedRenderVersion === this.ackVersion
    );
  }

  /** Click position as image fractions (0..1, top-left origin) to dataset units. */
  datasetCoords(fx: number, fy: number): [number, number] | null {
    if (!this.extent) return null;
    const [x0, y0, x1, y1] = this.extent;
    return [x0 + fx * (x1 - x0), y1 - fy * (y1 - y0)];
  }

  /** Pick the sample nearest to a dataset-space position. */
  async pick(x: number, y: number): Promise<SamplePayload | null> {
    if (!this.sessionId) {
      this.error = "load a dataset first";
      this.emit();
      return null;
    }
    this.selected = await this.client.getNearest(this.sessionId, x, y);
    this.emit();
    return this.selected;
  }

  // -- selected-sample color, one selector per view surface ----------------

  /** Map marker color: from the sample endpoint payload. */
  get mapMarkerHex(): string | null {
    return this.selected?.color.hex ?? null;
  }

  /** Legend marker color: from the legend payload, by sample index. */
  get legendMarkerHex(): string | null {
    if (!this.selected || !this.legend) return null;
    return this.legend.colors[this.selected.index]?.hex ?? null;
  }

  /** Bar-chart header swatch: same source as the map marker. */
  get barSwatchHex(): string | null {
    return this.mapMarkerHex;
  }

  get legendMarkerPosition(): [number, number] | null {
    if (!this.selected || !this.legend) return null;
    return this.legend.points[this.selected.index] ?? null;
  }
}
