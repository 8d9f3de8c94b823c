/** Payload shapes mirrored from the /api/v1 service. */

export type WarpModeName =
  | "none"
  | "color_preserving"
  | "contrast_enhancement"
  | "comparison_compression";

export interface KernelConfig {
  k_neighbors: number;
  kernel: string;
  bandwidth_scale: number;
}

export interface SessionConfig {
  warp_mode: WarpModeName;
  shrink: number;
  percentile: number;
  ellipse_scale_k: number;
  lightness: number;
  intensity_on: boolean;
  l_range: [number, number];
  kernel: KernelConfig;
  grid: [number, number];
  weight_mode: "raw_sum" | "normalized_sum";
}

export interface HslDict {
  h: number;
  s: number;
  l: number;
}

export interface LegendVertex {
  index: number;
  name: string;
  angle: number;
  color: HslDict;
  hex: string;
}

export interface EllipseDict {
  center: [number, number];
  axis1: [number, number];
  axis2: [number, number];
  a1: number;
  a2: number;
}

export interface LegendPayload {
  version: number;
  disc: { center: [number, number]; radius: number; lightness: number };
  vertices: LegendVertex[];
  points: [number, number][];
  colors: (HslDict & { hex: string })[];
  ellipse: EllipseDict;
  ellipse_outline: [number, number][];
}

export interface SamplePayload {
  index: number;
  location: [number, number];
  values: Record<string, number>;
  weight: number;
  color: HslDict & { hex: string };
  position: [number, number];
  distance?: number;
  version: number;
}

/** Raster geo extent: [x_min, y_min, x_max, y_max] in dataset units. */
export type Extent = [number, number, number, number];

export interface SessionCreated {
  id: string;
  attributes: string[];
  m: number;
  version: number;
  extent: Extent;
}

export interface ConfigResponse {
  version: number;
  config: SessionConfig;
  extent: Extent;
}

export interface LayoutPayload {
  version: number;
  order: number[];
  vertex_angles: number[];
  points: [number, number][];
}
