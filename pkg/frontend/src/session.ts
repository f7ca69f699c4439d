/** Designer session state: working document, undo stack, validation flags. */

import type { TemplateDoc, Violation } from "./types.js";

function clone<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

/** Split "irises[0].clip.threshold" into ["irises", 0, "clip", "threshold"]. */
export function parsePath(path: string): (string | number)[] {
  const parts: (string | number)[] = [];
  for (const segment of path.split(".")) {
    const match = segment.match(/^([^[\]]+)((\[\d+\])*)$/);
    if (!match) throw new Error(`bad path segment: ${segment}`);
    parts.push(match[1]!);
    for (const idx of match[2]!.matchAll(/\[(\d+)\]/g)) {
      parts.push(Number(idx[1]));
    }
  }
  return parts;
}

export function getAtPath(obj: unknown, path: string): unknown {
  let cur: unknown = obj;
  for (const key of parsePath(path)) {
    if (cur === null || typeof cur !== "object") return undefined;
    cur = (cur as Record<string | number, unknown>)[key];
  }
  return cur;
}

export function setAtPath(obj: unknown, path: string, value: unknown): void {
  const parts = parsePath(path);
  let cur = obj as Record<string | number, unknown>;
  for (const key of parts.slice(0, -1)) {
    const next = cur[key];
    if (next === null || typeof next !== "object") {
      throw new Error(`path ${path} does not exist`);
    }
    cur = next as Record<string | number, unknown>;
  }
  cur[parts[parts.length - 1]!] = value;
}

export class DesignerSession {
  doc: TemplateDoc | null = null;
  lightPos: [number, number] | null = null;
  referenceImage: string | null = null; // data URL, user-loaded
  referenceOpacity = 0;
  dirty = false;
  violations: Violation[] = [];
  private undoStack: TemplateDoc[] = [];

  load(doc: TemplateDoc): void {
    this.doc = clone(doc);
    this.undoStack = [];
    this.dirty = false;
    this.violations = [];
    this.lightPos = null;
  }

  get canUndo(): boolean {
    return this.undoStack.length > 0;
  }

  /** The document is saveable only when loaded, edited, and schema-valid. */
  get canSave(): boolean {
    return this.doc !== null && this.violations.length === 0;
  }

  /** Apply one field edit, pushing the prior state onto the undo stack. */
  editParameter(path: string, value: unknown): void {
    if (!this.doc) throw new Error("no document loaded");
    this.undoStack.push(clone(this.doc));
    setAtPath(this.doc.body, path, value);
    this.dirty = true;
  }

  /** Record the server validator's verdict for the current document. */
  setValidation(violations: Violation[]): void {
    this.violations = violations;
  }

  /** Inline errors for one field path (including nested paths under it). */
  errorsFor(path: string): Violation[] {
    return this.violations.filter(
      (v) => v.path === path || v.path.startsWith(path + "."),
    );
  }

  undo(): void {
    const prev = this.undoStack.pop();
    if (!prev) throw new Error("nothing to undo");
    this.doc = prev;
    this.violations = [];
    this.dirty = this.undoStack.length > 0;
  }

  dragLight(pos: [number, number]): void {
    if (!this.doc || this.doc.kind !== "reflect") {
      throw new Error("light dragging requires a reflect template");
    }
    this.lightPos = pos;
  }

  setReference(dataUrl: string | null): void {
    this.referenceImage = dataUrl;
  }

  setReferenceOpacity(opacity: number): void {
    if (opacity < 0 || opacity > 1) throw new Error("opacity must be in [0,1]");
    this.referenceOpacity = opacity;
  }

  markSaved(): void {
    this.dirty = false;
  }
}
