/** DOM designer: template picker, parameter fields, curve stops, live
 * preview with reference overlay, and light-source dragging for reflective
 * templates. All backend traffic goes through the FacadeClient.
 */

import { FacadeClient, ValidationError } from "./api.js";
import { isValidCurve, moveStop } from "./curve.js";
import { RenderScheduler } from "./renderLoop.js";
import { DesignerSession, getAtPath } from "./session.js";
import type {
  CurveBody,
  RenderRequest,
  RenderStats,
  TemplateDoc,
} from "./types.js";

interface FieldSpec {
  path: string;
  label: string;
  min: number;
  max: number;
  step: number;
}

const SCATTER_FIELDS: FieldSpec[] = [
  { path: "glare.radius", label: "glare radius", min: 1, max: 512, step: 1 },
  {
    path: "glare.vanishing_feather",
    label: "glare feather",
    min: 0.01,
    max: 1,
    step: 0.01,
  },
];

const REFLECT_FIELDS: FieldSpec[] = [
  { path: "irises[0].size", label: "iris size", min: 1, max: 256, step: 1 },
  { path: "irises[0].opacity", label: "iris opacity", min: 0, max: 1, step: 0.01 },
];

export interface DesignerOptions {
  debounceMs?: number;
  seed?: number;
}

export class Designer {
  readonly session = new DesignerSession();
  readonly scheduler: RenderScheduler<RenderRequest, RenderStats>;
  readonly lastStats: { value: RenderStats | null } = { value: null };

  private fieldsEl: HTMLElement;
  private violationsEl: HTMLUListElement;
  private previewEl: HTMLImageElement;
  private referenceEl: HTMLImageElement;
  private statusEl: HTMLElement;
  private selectEl: HTMLSelectElement;

  constructor(
    private root: HTMLElement,
    private client: FacadeClient,
    opts: DesignerOptions = {},
  ) {
    this.scheduler = new RenderScheduler(
      {
        run: (req) => this.client.renderStats(req),
        onResult: (stats) => this.showFrame(stats),
        onError: (err) => this.setStatus(`render failed: ${String(err)}`),
      },
      opts.debounceMs ?? 150,
    );
    root.innerHTML = `
      <div class="designer">
        <aside>
          <select id="template-list"></select>
          <button id="load">load</button>
          <button id="save" disabled>save</button>
          <button id="undo" disabled>undo</button>
          <div id="fields"></div>
          <label>reference opacity
            <input id="reference-opacity" type="range" min="0" max="1"
                   step="0.05" value="0">
          </label>
          <ul id="violations"></ul>
          <span id="status"></span>
        </aside>
        <main class="stage">
          <img id="preview" alt="preview">
          <img id="reference" alt="" style="opacity:0">
        </main>
      </div>`;
    this.fieldsEl = this.query("#fields");
    this.violationsEl = this.query("#violations");
    this.previewEl = this.query("#preview");
    this.referenceEl = this.query("#reference");
    this.statusEl = this.query("#status");
    this.selectEl = this.query("#template-list");
    this.query<HTMLButtonElement>("#load").addEventListener("click", () => {
      void this.loadTemplate(this.selectEl.value);
    });
    this.query<HTMLButtonElement>("#save").addEventListener("click", () => {
      void this.save();
    });
    this.query<HTMLButtonElement>("#undo").addEventListener("click", () => {
      void this.undo();
    });
    this.query<HTMLInputElement>("#reference-opacity").addEventListener(
      "input",
      (event) => {
        const value = Number((event.target as HTMLInputElement).value);
        this.setReferenceOpacity(value);
      },
    );
    this.seed = opts.seed ?? 0;
  }

  private seed: number;

  private query<T extends HTMLElement>(selector: string): T {
    const el = this.root.querySelector(selector);
    if (!el) throw new Error(`missing element ${selector}`);
    return el as T;
  }

  private setStatus(text: string): void {
    this.statusEl.textContent = text;
  }

  async refreshTemplates(): Promise<string[]> {
    const ids = await this.client.listTemplates();
    this.selectEl.innerHTML = ids
      .map((id) => `<option value="${id}">${id}</option>`)
      .join("");
    return ids;
  }

  async loadTemplate(id: string): Promise<void> {
    const doc = await this.client.getTemplate(id);
    this.session.load(doc);
    this.renderFields();
    this.updateChrome();
    this.requestPreview();
    this.scheduler.flush();
    this.setStatus(`loaded ${id}`);
  }

  /** Edit one field, validate on the server, and re-render only when valid. */
  async editField(path: string, value: unknown): Promise<boolean> {
    if (!this.session.doc) throw new Error("no document loaded");
    this.session.editParameter(path, value);
    const violations = await this.client.validate(this.session.doc);
    this.session.setValidation(violations);
    this.updateChrome();
    if (violations.length === 0) {
      this.requestPreview();
      return true;
    }
    this.setStatus("invalid edit; preview unchanged");
    return false;
  }

  /** Drag a curve control point; invalid geometries never leave the client. */
  async moveCurveStop(
    curvePath: string,
    index: number,
    t: number,
    intensity: number,
  ): Promise<boolean> {
    if (!this.session.doc) throw new Error("no document loaded");
    const curve = getAtPath(this.session.doc.body, curvePath) as CurveBody;
    const next = moveStop(curve, index, t, intensity);
    if (!isValidCurve(next)) return false;
    return this.editField(curvePath, next);
  }

  dragLight(pos: [number, number]): void {
    this.session.dragLight(pos);
    this.requestPreview();
  }

  async save(): Promise<boolean> {
    const doc = this.session.doc;
    if (!doc) return false;
    if (!this.session.canSave) {
      this.setStatus("cannot save: document has validation errors");
      return false;
    }
    try {
      await this.client.putTemplate(doc);
    } catch (err) {
      if (err instanceof ValidationError) {
        this.session.setValidation(err.violations);
        this.updateChrome();
        this.setStatus("server rejected the document");
        return false;
      }
      throw err;
    }
    this.session.markSaved();
    this.updateChrome();
    this.setStatus(`saved ${doc.id}`);
    return true;
  }

  async undo(): Promise<void> {
    this.session.undo();
    if (this.session.doc) {
      const violations = await this.client.validate(this.session.doc);
      this.session.setValidation(violations);
    }
    this.renderFields();
    this.updateChrome();
    if (this.session.violations.length === 0) this.requestPreview();
  }

  setReference(dataUrl: string | null): void {
    this.session.setReference(dataUrl);
    this.referenceEl.src = dataUrl ?? "";
  }

  setReferenceOpacity(opacity: number): void {
    this.session.setReferenceOpacity(opacity);
    this.referenceEl.style.opacity = String(opacity);
    this.previewEl.style.opacity = String(1 - opacity);
  }

  requestPreview(): void {
    const doc = this.session.doc;
    if (!doc || this.session.violations.length > 0) return;
    const req: RenderRequest = { template: doc, seed: this.seed };
    if (doc.kind === "reflect" && this.session.lightPos) {
      req.light_pos = this.session.lightPos;
    }
    this.scheduler.request(req);
  }

  private showFrame(stats: RenderStats): void {
    this.lastStats.value = stats;
    this.previewEl.src = `data:image/png;base64,${stats.image_base64}`;
    this.setStatus(
      `rendered ${stats.width}x${stats.height} in ${stats.render_millis.toFixed(0)} ms`,
    );
  }

  private updateChrome(): void {
    this.query<HTMLButtonElement>("#save").disabled = !this.session.canSave;
    this.query<HTMLButtonElement>("#undo").disabled = !this.session.canUndo;
    this.violationsEl.innerHTML = this.session.violations
      .map((v) => `<li data-path="${v.path}">${v.path}: ${v.message}</li>`)
      .join("");
  }

  private renderFields(): void {
    const doc = this.session.doc;
    this.fieldsEl.innerHTML = "";
    if (!doc) return;
    const specs = doc.kind === "scatter" ? SCATTER_FIELDS : REFLECT_FIELDS;
    for (const spec of specs) {
      const value = getAtPath(doc.body, spec.path);
      if (value === undefined) continue;
      const row = document.createElement("label");
      row.textContent = spec.label;
      const input = document.createElement("input");
      input.type = "number";
      input.min = String(spec.min);
      input.max = String(spec.max);
      input.step = String(spec.step);
      input.value = String(value);
      input.dataset.path = spec.path;
      input.addEventListener("change", () => {
        void this.editField(spec.path, Number(input.value));
      });
      row.appendChild(input);
      this.fieldsEl.appendChild(row);
    }
  }
}

export function mountDesigner(
  root: HTMLElement,
  baseUrl: string,
  opts: DesignerOptions = {},
): Designer {
  return new Designer(root, new FacadeClient(baseUrl), opts);
}

export type { TemplateDoc };
