/**
 * Selection panel: k / seed / strategy / weights form posting to
 * /api/select. At most one request is in flight; while it runs the
 * previous selection is greyed out rather than hidden, and only the
 * confirmed response updates the view (no optimistic state).
 */

import { ApiError, ReviewApi } from "./api.js";
import type { SelectionResponse, SelectRequest } from "./types.js";

export interface PanelHandlers {
  onSelected(selection: SelectionResponse): void;
  onError(message: string): void;
  onBusy(busy: boolean): void;
}

export class SelectionPanel {
  private inFlight = false;
  private form: HTMLFormElement;

  constructor(
    root: HTMLElement,
    private api: ReviewApi,
    private handlers: PanelHandlers,
  ) {
    this.form = document.createElement("form");
    this.form.className = "selection-panel";
    this.form.innerHTML = `
      <label>k <input name="k" type="number" min="1" value="5"></label>
      <label>seed <input name="seed" type="number" value="2024"></label>
      <label>strategy
        <select name="strategy">
          <option value="afse" selected>afse</option>
          <option value="afse-wo-scorer">afse-wo-scorer</option>
          <option value="uniform">uniform</option>
          <option value="random">random</option>
        </select>
      </label>
      <label>weights <input name="weights" placeholder="0.2,0.2,0.2,0.2,0.2"></label>
      <button type="submit">run selection</button>
    `;
    this.form.addEventListener("submit", (e) => {
      e.preventDefault();
      void this.submit();
    });
    root.appendChild(this.form);
  }

  get busy(): boolean {
    return this.inFlight;
  }

  /** Read the form into a request; null plus an error for bad weights. */
  readRequest(): SelectRequest | null {
    const data = new FormData(this.form);
    const req: SelectRequest = {
      k: Number(data.get("k")),
      seed: Number(data.get("seed")),
      strategy: String(data.get("strategy")),
    };
    const weightsRaw = String(data.get("weights") ?? "").trim();
    if (weightsRaw !== "") {
      const weights = weightsRaw.split(",").map((s) => Number(s.trim()));
      if (weights.length !== 5 || weights.some((w) => !Number.isFinite(w))) {
        this.handlers.onError("weights must be 5 comma-separated numbers");
        return null;
      }
      req.weights = weights;
    }
    return req;
  }

  async submit(): Promise<void> {
    if (this.inFlight) return;
    const req = this.readRequest();
    if (req === null) return;

    this.inFlight = true;
    this.handlers.onBusy(true);
    try {
      const selection = await this.api.select(req);
      this.handlers.onSelected(selection);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.handlers.onError("choose a reference frame first");
      } else {
        this.handlers.onError(err instanceof Error ? err.message : String(err));
      }
    } finally {
      this.inFlight = false;
      this.handlers.onBusy(false);
    }
  }
}
