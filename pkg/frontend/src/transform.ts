/**
 * View transform between screen space and image pixel space.
 *
 * The image is drawn scaled by `zoom` and offset by `pan` (both in CSS
 * pixels of the viewport). Prompts are stored in image pixel space, so
 * every click goes through screenToImage and every marker goes back
 * through imageToScreen. Keeping this math in one pure class is what
 * makes the coordinate contract testable: saved coordinates must not
 * depend on the zoom level at which the user happened to click.
 */

export interface Point {
  x: number;
  y: number;
}

export const MIN_ZOOM = 0.125;
export const MAX_ZOOM = 16;

export class ViewTransform {
  zoom: number;
  pan: Point;

  constructor(zoom = 1, pan: Point = { x: 0, y: 0 }) {
    this.zoom = zoom;
    this.pan = { ...pan };
  }

  /** Continuous image coordinates of a screen position. */
  screenToImage(screen: Point): Point {
    return {
      x: (screen.x - this.pan.x) / this.zoom,
      y: (screen.y - this.pan.y) / this.zoom,
    };
  }

  /** Screen position of continuous image coordinates. */
  imageToScreen(image: Point): Point {
    return {
      x: image.x * this.zoom + this.pan.x,
      y: image.y * this.zoom + this.pan.y,
    };
  }

  /** Integer pixel under a screen position (top-left origin). */
  pixelAt(screen: Point): Point {
    const img = this.screenToImage(screen);
    return { x: Math.floor(img.x), y: Math.floor(img.y) };
  }

  /** Screen position of a pixel's center, for drawing markers. */
  pixelCenter(pixel: Point): Point {
    return this.imageToScreen({ x: pixel.x + 0.5, y: pixel.y + 0.5 });
  }

  /** Set zoom while keeping the image point under `anchor` fixed. */
  zoomAround(anchor: Point, zoom: number): void {
    const clamped = Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, zoom));
    const before = this.screenToImage(anchor);
    this.zoom = clamped;
    this.pan = {
      x: anchor.x - before.x * clamped,
      y: anchor.y - before.y * clamped,
    };
  }

  panBy(dx: number, dy: number): void {
    this.pan = { x: this.pan.x + dx, y: this.pan.y + dy };
  }

  /** Center the image in a viewport at a zoom that fits it entirely. */
  fitTo(viewportW: number, viewportH: number, imageW: number, imageH: number): void {
    const fit = Math.min(viewportW / imageW, viewportH / imageH);
    this.zoom = Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, fit));
    this.pan = {
      x: (viewportW - imageW * this.zoom) / 2,
      y: (viewportH - imageH * this.zoom) / 2,
    };
  }
}

/** True when the pixel lies inside a width x height image. */
export function inBounds(pixel: Point, width: number, height: number): boolean {
  return pixel.x >= 0 && pixel.x < width && pixel.y >= 0 && pixel.y < height;
}
