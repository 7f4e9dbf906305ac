/**
 * Annotation state for one frame: labeled points plus an optional
 * bounding box with drag-in-progress tracking. Pure data operations;
 * the DOM layer feeds it image pixel coordinates only.
 */

import { inBounds, type Point } from "./transform.js";
import type { Bbox, PromptEntry, PromptPoint } from "./types.js";

export class AnnotationState {
  readonly frameId: string;
  readonly width: number;
  readonly height: number;
  points: PromptPoint[] = [];
  bbox: Bbox | null = null;
  private dragStart: Point | null = null;

  constructor(frameId: string, width: number, height: number) {
    this.frameId = frameId;
    this.width = width;
    this.height = height;
  }

  /** Add a point; out-of-bounds placements are rejected, not clamped. */
  addPoint(pixel: Point, label: 0 | 1): boolean {
    if (!inBounds(pixel, this.width, this.height)) return false;
    this.points.push({ x: pixel.x, y: pixel.y, label });
    return true;
  }

  /** Remove the point nearest to `pixel` within `radius` image px. */
  removePointNear(pixel: Point, radius: number): boolean {
    let bestIdx = -1;
    let bestDist = radius;
    this.points.forEach((p, i) => {
      const d = Math.hypot(p.x - pixel.x, p.y - pixel.y);
      if (d <= bestDist) {
        bestDist = d;
        bestIdx = i;
      }
    });
    if (bestIdx < 0) return false;
    this.points.splice(bestIdx, 1);
    return true;
  }

  beginBox(pixel: Point): void {
    this.dragStart = this.clampPixel(pixel);
  }

  get dragging(): boolean {
    return this.dragStart !== null;
  }

  /** Update the box to span the drag origin and the current pixel. */
  dragBox(pixel: Point): void {
    if (!this.dragStart) return;
    const p = this.clampPixel(pixel);
    this.bbox = [
      Math.min(this.dragStart.x, p.x),
      Math.min(this.dragStart.y, p.y),
      Math.max(this.dragStart.x, p.x),
      Math.max(this.dragStart.y, p.y),
    ];
  }

  endBox(pixel: Point): void {
    this.dragBox(pixel);
    this.dragStart = null;
  }

  clearBox(): void {
    this.bbox = null;
    this.dragStart = null;
  }

  clear(): void {
    this.points = [];
    this.clearBox();
  }

  get empty(): boolean {
    return this.points.length === 0 && this.bbox === null;
  }

  /** Load a saved entry, replacing local state. */
  restore(entry: PromptEntry): void {
    this.points = entry.points.map((p) => ({ ...p }));
    this.bbox = entry.bbox ? [...entry.bbox] : null;
    this.dragStart = null;
  }

  toPayload(): PromptEntry {
    return {
      frame_id: this.frameId,
      points: this.points.map((p) => ({ ...p })),
      bbox: this.bbox ? [...this.bbox] : null,
    };
  }

  // Box corners clamp so a drag that leaves the image still yields a
  // valid box; points never clamp (see addPoint).
  private clampPixel(pixel: Point): Point {
    return {
      x: Math.min(this.width - 1, Math.max(0, pixel.x)),
      y: Math.min(this.height - 1, Math.max(0, pixel.y)),
    };
  }
}
