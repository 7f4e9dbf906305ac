/**
 * Application shell: loads the dataset, keeps the one copy of service
 * state (frames, latest scores or selection payload, saved
 * annotations), and swaps between the gallery and the annotation view.
 * The UI holds no derived numbers; a reload starts from /api/status.
 */

import { ApiError, ReviewApi } from "./api.js";
import { AnnotateView } from "./annotateView.js";
import { GalleryView, renderBanner } from "./gallery.js";
import { SelectionPanel } from "./panel.js";
import type { FrameInfo, PromptEntry, ScoresResponse } from "./types.js";

class App {
  private api = new ReviewApi();
  private frames: FrameInfo[] = [];
  private scores: ScoresResponse | null = null;
  private annotations = new Map<string, PromptEntry>();

  private banner: HTMLElement;
  private galleryRoot: HTMLElement;
  private annotateRoot: HTMLElement;
  private gallery: GalleryView;

  constructor(private root: HTMLElement) {
    this.banner = this.section("banner");
    this.banner.hidden = true;
    const panelRoot = this.section("panel-root");
    this.galleryRoot = this.section("gallery-root");
    this.annotateRoot = this.section("annotate-root");
    this.annotateRoot.hidden = true;

    this.gallery = new GalleryView(this.galleryRoot, {
      onOpen: (id) => this.openAnnotate(id),
      onSetReference: (id) => void this.setReference(id),
    });

    new SelectionPanel(panelRoot, this.api, {
      onSelected: (selection) => {
        this.scores = selection;
        renderBanner(this.banner, null);
        this.gallery.setSort("rank");
        this.renderGallery();
      },
      onError: (message) => renderBanner(this.banner, message),
      onBusy: (busy) => this.galleryRoot.classList.toggle("stale", busy),
    });

    const sortToggle = document.createElement("label");
    sortToggle.className = "sort-toggle";
    const box = document.createElement("input");
    box.type = "checkbox";
    box.addEventListener("change", () => {
      this.gallery.setSort(box.checked ? "rank" : "ingest");
      this.renderGallery();
    });
    sortToggle.append(box, document.createTextNode(" sort by rank"));
    panelRoot.appendChild(sortToggle);
  }

  async start(): Promise<void> {
    try {
      const status = await this.api.getStatus();
      if (!status.dataset_loaded) {
        renderBanner(this.banner, "service has no dataset mounted", () => void this.start());
        return;
      }
      this.frames = (await this.api.getFrames()).frames;
      if (status.reference_id !== null) {
        this.scores = await this.api.getScores();
      }
      renderBanner(this.banner, null);
      this.renderGallery();
    } catch (err) {
      // No stale data: an unreachable service leaves the gallery empty.
      this.frames = [];
      this.scores = null;
      this.galleryRoot.textContent = "";
      const message = err instanceof ApiError ? err.message : "service unreachable";
      renderBanner(this.banner, message, () => void this.start());
    }
  }

  private section(className: string): HTMLElement {
    const el = document.createElement("section");
    el.className = className;
    this.root.appendChild(el);
    return el;
  }

  private renderGallery(): void {
    this.gallery.render(this.frames, this.scores);
  }

  private async setReference(frameId: string): Promise<void> {
    try {
      this.scores = await this.api.setReference(frameId);
      renderBanner(this.banner, null);
      this.renderGallery();
    } catch (err) {
      renderBanner(this.banner, err instanceof Error ? err.message : String(err));
    }
  }

  private openAnnotate(frameId: string): void {
    const frame = this.frames.find((f) => f.id === frameId);
    if (!frame) return;
    this.galleryRoot.hidden = true;
    this.annotateRoot.hidden = false;
    new AnnotateView(this.annotateRoot, frame, this.annotations.get(frameId) ?? null, {
      onSave: (entry) => void this.saveAnnotation(entry),
      onClose: () => {
        this.annotateRoot.hidden = true;
        this.galleryRoot.hidden = false;
        this.renderGallery();
      },
    });
  }

  private async saveAnnotation(entry: PromptEntry): Promise<void> {
    try {
      const saved = await this.api.savePrompts(entry);
      this.annotations.set(saved.frame_id, saved);
      renderBanner(this.banner, null);
    } catch (err) {
      renderBanner(this.banner, err instanceof Error ? err.message : String(err));
    }
  }
}

const rootEl = document.getElementById("app");
if (rootEl) {
  void new App(rootEl).start();
}

export { App };
