/**
 * Frame gallery: thumbnails in ingest order with per-frame score,
 * cluster color, and distance once the service has them. Representative
 * frames get a badge; clicking a card opens the annotation view and the
 * header button posts the reference frame.
 */

import { buildGalleryRows, clusterColor, sortRows, type GallerySort } from "./viewmodel.js";
import type { FrameInfo, ScoresResponse } from "./types.js";

export interface GalleryHandlers {
  onOpen(frameId: string): void;
  onSetReference(frameId: string): void;
}

export class GalleryView {
  private sort: GallerySort = "ingest";

  constructor(
    private container: HTMLElement,
    private handlers: GalleryHandlers,
  ) {}

  setSort(by: GallerySort): void {
    this.sort = by;
  }

  render(frames: FrameInfo[], scores: ScoresResponse | null): void {
    const rows = sortRows(buildGalleryRows(frames, scores), this.sort);
    this.container.textContent = "";

    for (const row of rows) {
      const card = document.createElement("div");
      card.className = "frame-card";
      card.dataset.frameId = row.id;
      if (row.isReference) card.classList.add("is-reference");

      const thumb = document.createElement("img");
      thumb.className = "frame-thumb";
      thumb.src = row.thumbnailUrl;
      thumb.alt = row.id;
      thumb.addEventListener("click", () => this.handlers.onOpen(row.id));
      card.appendChild(thumb);

      if (row.isRepresentative) {
        const badge = document.createElement("span");
        badge.className = "rep-badge";
        badge.textContent = "representative";
        card.appendChild(badge);
      }

      const label = document.createElement("div");
      label.className = "frame-label";
      label.textContent = row.id;
      card.appendChild(label);

      const stats = document.createElement("dl");
      stats.className = "frame-stats";
      this.stat(stats, "F", row.scoreText, "stat-f");
      this.stat(stats, "cluster", row.clusterText, "stat-cluster");
      this.stat(stats, "distance", row.distanceText, "stat-distance");
      this.stat(stats, "rank", row.rankText, "stat-rank");
      card.appendChild(stats);
      if (row.clusterText !== "") {
        card.style.borderColor = clusterColor(Number(row.clusterText));
      }

      const refBtn = document.createElement("button");
      refBtn.className = "set-reference";
      refBtn.textContent = row.isReference ? "reference" : "set as reference";
      refBtn.disabled = row.isReference;
      refBtn.addEventListener("click", () => this.handlers.onSetReference(row.id));
      card.appendChild(refBtn);

      this.container.appendChild(card);
    }
  }

  private stat(list: HTMLDListElement, name: string, value: string, cls: string): void {
    const dt = document.createElement("dt");
    dt.textContent = name;
    const dd = document.createElement("dd");
    dd.className = cls;
    dd.textContent = value;
    list.append(dt, dd);
  }
}

/** Error banner shared by all views; hidden while `message` is null. */
export function renderBanner(
  el: HTMLElement,
  message: string | null,
  onRetry?: () => void,
): void {
  el.textContent = "";
  if (message === null) {
    el.hidden = true;
    return;
  }
  el.hidden = false;
  const text = document.createElement("span");
  text.textContent = message;
  el.appendChild(text);
  if (onRetry) {
    const retry = document.createElement("button");
    retry.textContent = "retry";
    retry.addEventListener("click", onRetry);
    el.appendChild(retry);
  }
}
