/** Shared wire types for the designer backend. */

export type TemplateKind = "scatter" | "reflect";

export interface TemplateDoc {
  id: string;
  kind: TemplateKind;
  schema_version: number;
  body: Record<string, unknown>;
  metadata: Record<string, unknown>;
}

export interface Violation {
  path: string;
  message: string;
}

export interface RenderStats {
  image_base64: string;
  render_millis: number;
  mean_luminance: number;
  max_luminance: number;
  width: number;
  height: number;
}

export interface RenderRequest {
  template?: TemplateDoc;
  id?: string;
  light_pos?: [number, number];
  canvas?: [number, number];
  encoding?: "preview" | "full";
  seed?: number;
  stats?: boolean;
}

export interface ComposePreview {
  seed: number;
  images: Record<string, string>;
  provenance: Record<string, unknown>;
}

/** One stop of a distance->color curve: [t, [r, g, b]]. */
export type CurveStop = [number, [number, number, number]];

export interface CurveBody {
  control_points: CurveStop[];
}
