// Coordinate integrity: prompts are stored in image pixel space, so a
// click on the same image pixel must export the same coordinates at
// every zoom level. The headline case drives the real annotation view
// DOM; the rest pins the pure transform math.

import { describe, expect, it } from "vitest";
import { AnnotateView } from "../src/annotateView.js";
import { ViewTransform } from "../src/transform.js";
import type { FrameInfo, PromptEntry } from "../src/types.js";

const FRAME: FrameInfo = {
  id: "frame_042",
  width: 128,
  height: 128,
  has_mask: true,
  thumbnail_url: "/api/frames/frame_042/thumbnail",
  image_url: "/api/frames/frame_042/image",
};

function mountView(saved: PromptEntry | null = null) {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const savedEntries: PromptEntry[] = [];
  const view = new AnnotateView(root, FRAME, saved, {
    onSave: (entry) => savedEntries.push(entry),
    onClose: () => {},
  });
  const stage = root.querySelector<HTMLElement>(".annotate-stage");
  if (!stage) throw new Error("stage not rendered");
  return { root, view, stage, savedEntries };
}

function click(stage: HTMLElement, x: number, y: number, button = 0, init: MouseEventInit = {}) {
  // jsdom reports a zero rect for the stage, so client coordinates are
  // stage coordinates here.
  stage.dispatchEvent(
    new MouseEvent("mousedown", { clientX: x, clientY: y, button, bubbles: true, ...init }),
  );
  stage.dispatchEvent(
    new MouseEvent("mouseup", { clientX: x, clientY: y, button, bubbles: true, ...init }),
  );
}

describe("point placement across zoom levels", () => {
  it("exports image pixel (37, 81) when clicked at zoom 0.5, 1, and 2", () => {
    for (const zoom of [0.5, 1, 2]) {
      const { root, view, stage, savedEntries } = mountView();

      const zoomBtn = root.querySelector<HTMLButtonElement>(
        `.zoom-${String(zoom).replace(".", "_")}`,
      );
      expect(zoomBtn, `zoom button for ${zoom}`).not.toBeNull();
      zoomBtn!.click();
      expect(view.transform.zoom).toBe(zoom);

      const screen = view.transform.pixelCenter({ x: 37, y: 81 });
      click(stage, screen.x, screen.y);

      root.querySelector<HTMLButtonElement>(".save-prompts")!.click();
      expect(savedEntries).toHaveLength(1);
      expect(savedEntries[0].points).toEqual([{ x: 37, y: 81, label: 1 }]);
      expect(savedEntries[0].frame_id).toBe("frame_042");
      root.remove();
    }
  });

  it("keeps (37, 81) after wheel zoom and panning moved the view", () => {
    const { view, stage, savedEntries, root } = mountView();
    view.transform.panBy(23.5, -11.25);
    view.transform.zoomAround({ x: 40, y: 60 }, 1.7);

    const screen = view.transform.pixelCenter({ x: 37, y: 81 });
    click(stage, screen.x, screen.y);
    click(stage, screen.x + 0.3 * view.transform.zoom, screen.y, 2); // right click, same pixel

    root.querySelector<HTMLButtonElement>(".save-prompts")!.click();
    expect(savedEntries[0].points).toEqual([
      { x: 37, y: 81, label: 1 },
      { x: 37, y: 81, label: 0 },
    ]);
  });

  it("blocks out-of-bounds placements client-side", () => {
    const { view, stage, savedEntries, root } = mountView();
    const outside = view.transform.pixelCenter({ x: 128, y: 5 });
    click(stage, outside.x, outside.y);
    expect(view.state.points).toHaveLength(0);

    root.querySelector<HTMLButtonElement>(".save-prompts")!.click();
    expect(savedEntries).toHaveLength(0); // nothing to save
  });
});

describe("ViewTransform", () => {
  it("round-trips screen -> image -> screen within 0.5 px at all zoom levels", () => {
    for (const zoom of [0.125, 0.5, 1, 2, 3.7, 16]) {
      const t = new ViewTransform(zoom, { x: -17.25, y: 42.5 });
      for (const screen of [
        { x: 0, y: 0 },
        { x: 13.2, y: 999.9 },
        { x: -5.5, y: 0.25 },
      ]) {
        const back = t.imageToScreen(t.screenToImage(screen));
        expect(Math.abs(back.x - screen.x)).toBeLessThanOrEqual(0.5);
        expect(Math.abs(back.y - screen.y)).toBeLessThanOrEqual(0.5);
      }
    }
  });

  it("pixelAt inverts pixelCenter for every pixel and zoom tested", () => {
    for (const zoom of [0.25, 0.5, 1, 2, 5]) {
      const t = new ViewTransform(zoom, { x: 3.75, y: -120 });
      for (const pixel of [
        { x: 0, y: 0 },
        { x: 37, y: 81 },
        { x: 127, y: 1 },
      ]) {
        expect(t.pixelAt(t.pixelCenter(pixel))).toEqual(pixel);
      }
    }
  });

  it("zoomAround keeps the anchored image point fixed", () => {
    const t = new ViewTransform(1, { x: 10, y: 20 });
    const anchor = { x: 55, y: 66 };
    const before = t.screenToImage(anchor);
    t.zoomAround(anchor, 2.5);
    const after = t.screenToImage(anchor);
    expect(after.x).toBeCloseTo(before.x, 10);
    expect(after.y).toBeCloseTo(before.y, 10);
  });

  it("clamps zoom to the allowed range", () => {
    const t = new ViewTransform();
    t.zoomAround({ x: 0, y: 0 }, 1e9);
    expect(t.zoom).toBe(16);
    t.zoomAround({ x: 0, y: 0 }, 0);
    expect(t.zoom).toBe(0.125);
  });
});
