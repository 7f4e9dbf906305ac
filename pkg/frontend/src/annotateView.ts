/**
 * Annotation view: the frame at full resolution under a zoom/pan
 * transform, with click-to-place prompt points and a drag bbox.
 *
 * Left click places a positive point, right click a negative one,
 * shift+drag draws the box, wheel zooms around the cursor. All
 * coordinates are converted to image pixel space through ViewTransform
 * the moment they leave the DOM event, so saved prompts are identical
 * at every zoom level.
 */

import { AnnotationState } from "./annotate.js";
import { inBounds, ViewTransform, type Point } from "./transform.js";
import type { FrameInfo, PromptEntry } from "./types.js";

export interface AnnotateHandlers {
  onSave(entry: PromptEntry): void;
  onClose(): void;
}

const REMOVE_RADIUS_PX = 4; // image pixels, alt-click erases

export class AnnotateView {
  readonly state: AnnotationState;
  readonly transform = new ViewTransform();
  private stage: HTMLElement;
  private image: HTMLImageElement;
  private overlay: HTMLElement;
  private panning: { last: Point } | null = null;

  constructor(
    private root: HTMLElement,
    private frame: FrameInfo,
    saved: PromptEntry | null,
    private handlers: AnnotateHandlers,
  ) {
    this.state = new AnnotationState(frame.id, frame.width, frame.height);
    if (saved) this.state.restore(saved);

    this.root.textContent = "";
    this.root.appendChild(this.buildToolbar());

    this.stage = document.createElement("div");
    this.stage.className = "annotate-stage";

    this.image = document.createElement("img");
    this.image.className = "annotate-image";
    this.image.src = frame.image_url;
    this.image.draggable = false;
    this.stage.appendChild(this.image);

    this.overlay = document.createElement("div");
    this.overlay.className = "annotate-overlay";
    this.stage.appendChild(this.overlay);

    this.stage.addEventListener("mousedown", (e) => this.onMouseDown(e));
    this.stage.addEventListener("mousemove", (e) => this.onMouseMove(e));
    this.stage.addEventListener("mouseup", (e) => this.onMouseUp(e));
    this.stage.addEventListener("contextmenu", (e) => e.preventDefault());
    this.stage.addEventListener("wheel", (e) => this.onWheel(e), { passive: false });

    this.root.appendChild(this.stage);
    this.redraw();
  }

  setZoom(zoom: number): void {
    const rect = this.stage.getBoundingClientRect();
    this.transform.zoomAround({ x: rect.width / 2, y: rect.height / 2 }, zoom);
    this.redraw();
  }

  /** Place a labeled point at a stage position; true when it landed. */
  placeAt(stagePos: Point, label: 0 | 1): boolean {
    const pixel = this.transform.pixelAt(stagePos);
    const ok = this.state.addPoint(pixel, label);
    if (ok) this.redraw();
    return ok;
  }

  private buildToolbar(): HTMLElement {
    const bar = document.createElement("div");
    bar.className = "annotate-toolbar";

    const title = document.createElement("span");
    title.className = "annotate-title";
    title.textContent = `${this.frame.id} (${this.frame.width}x${this.frame.height})`;
    bar.appendChild(title);

    for (const zoom of [0.5, 1, 2]) {
      const btn = document.createElement("button");
      btn.className = `zoom-btn zoom-${String(zoom).replace(".", "_")}`;
      btn.textContent = `${zoom}x`;
      btn.addEventListener("click", () => this.setZoom(zoom));
      bar.appendChild(btn);
    }

    const clearBtn = document.createElement("button");
    clearBtn.textContent = "clear";
    clearBtn.addEventListener("click", () => {
      this.state.clear();
      this.redraw();
    });
    bar.appendChild(clearBtn);

    const saveBtn = document.createElement("button");
    saveBtn.className = "save-prompts";
    saveBtn.textContent = "save";
    saveBtn.addEventListener("click", () => {
      if (!this.state.empty) this.handlers.onSave(this.state.toPayload());
    });
    bar.appendChild(saveBtn);

    const closeBtn = document.createElement("button");
    closeBtn.textContent = "back to gallery";
    closeBtn.addEventListener("click", () => this.handlers.onClose());
    bar.appendChild(closeBtn);

    return bar;
  }

  private stagePos(e: MouseEvent): Point {
    const rect = this.stage.getBoundingClientRect();
    return { x: e.clientX - rect.left, y: e.clientY - rect.top };
  }

  private onMouseDown(e: MouseEvent): void {
    e.preventDefault();
    const pos = this.stagePos(e);
    if (e.shiftKey && e.button === 0) {
      this.state.beginBox(this.transform.pixelAt(pos));
      return;
    }
    if (e.button === 1) {
      this.panning = { last: pos };
      return;
    }
    if (e.altKey && e.button === 0) {
      if (this.state.removePointNear(this.transform.screenToImage(pos), REMOVE_RADIUS_PX)) {
        this.redraw();
      }
      return;
    }
    if (e.button === 0) this.placeAt(pos, 1);
    if (e.button === 2) this.placeAt(pos, 0);
  }

  private onMouseMove(e: MouseEvent): void {
    const pos = this.stagePos(e);
    if (this.panning) {
      this.transform.panBy(pos.x - this.panning.last.x, pos.y - this.panning.last.y);
      this.panning.last = pos;
      this.redraw();
      return;
    }
    if (this.state.dragging) {
      this.state.dragBox(this.transform.pixelAt(pos));
      this.redraw();
    }
  }

  private onMouseUp(e: MouseEvent): void {
    const pos = this.stagePos(e);
    if (this.panning) {
      this.panning = null;
      return;
    }
    if (this.state.dragging) {
      this.state.endBox(this.transform.pixelAt(pos));
      this.redraw();
    }
  }

  private onWheel(e: WheelEvent): void {
    e.preventDefault();
    const factor = e.deltaY < 0 ? 1.25 : 0.8;
    this.transform.zoomAround(this.stagePos(e), this.transform.zoom * factor);
    this.redraw();
  }

  private redraw(): void {
    const t = this.transform;
    this.image.style.transformOrigin = "0 0";
    this.image.style.transform = `translate(${t.pan.x}px, ${t.pan.y}px) scale(${t.zoom})`;

    this.overlay.textContent = "";
    for (const p of this.state.points) {
      if (!inBounds(p, this.frame.width, this.frame.height)) continue;
      const marker = document.createElement("div");
      marker.className = p.label === 1 ? "point positive" : "point negative";
      const center = t.pixelCenter(p);
      marker.style.left = `${center.x}px`;
      marker.style.top = `${center.y}px`;
      marker.title = `(${p.x}, ${p.y}) ${p.label === 1 ? "+" : "-"}`;
      this.overlay.appendChild(marker);
    }

    if (this.state.bbox) {
      const [x0, y0, x1, y1] = this.state.bbox;
      const tl = t.imageToScreen({ x: x0, y: y0 });
      const br = t.imageToScreen({ x: x1 + 1, y: y1 + 1 }); // inclusive box
      const box = document.createElement("div");
      box.className = "bbox";
      box.style.left = `${tl.x}px`;
      box.style.top = `${tl.y}px`;
      box.style.width = `${br.x - tl.x}px`;
      box.style.height = `${br.y - tl.y}px`;
      this.overlay.appendChild(box);
    }
  }
}
