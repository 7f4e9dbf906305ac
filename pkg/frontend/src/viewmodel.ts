/**
 * Pure view models for the gallery and cluster panels.
 *
 * Every displayed number passes through here unchanged from the service
 * payload: formatting is String() so the rendered text round-trips the
 * exact value the engine computed. No score, cluster, or rank is ever
 * derived client-side.
 */

import type { FrameInfo, ScoreRow, ScoresResponse } from "./types.js";

export interface GalleryRow {
  id: string;
  thumbnailUrl: string;
  hasMask: boolean;
  isReference: boolean;
  isRepresentative: boolean;
  /** Exact decimal text of F, or "" before scoring. */
  scoreText: string;
  /** Cluster index as text, "" when unclustered. */
  clusterText: string;
  distanceText: string;
  rankText: string;
  /** Sort key: service rank, representatives first (rank null). */
  rankOrder: number;
}

export type GallerySort = "ingest" | "rank";

const num = (v: number | null | undefined): string => (v == null ? "" : String(v));

export function buildGalleryRows(
  frames: FrameInfo[],
  scores: ScoresResponse | null,
): GalleryRow[] {
  const byId = new Map<string, ScoreRow>();
  for (const row of scores?.frames ?? []) byId.set(row.id, row);

  return frames.map((frame) => {
    const row = byId.get(frame.id);
    const rank = row?.rank;
    return {
      id: frame.id,
      thumbnailUrl: frame.thumbnail_url,
      hasMask: frame.has_mask,
      isReference: scores !== null && frame.id === scores.reference_id,
      isRepresentative: row?.is_representative === true,
      scoreText: num(row?.F),
      clusterText: num(row?.cluster),
      distanceText: num(row?.distance),
      rankText: num(rank),
      rankOrder: row?.is_representative ? -1 : rank ?? Number.MAX_SAFE_INTEGER,
    };
  });
}

/** Stable sort; "rank" puts representatives first, then service order. */
export function sortRows(rows: GalleryRow[], by: GallerySort): GalleryRow[] {
  if (by === "ingest") return [...rows];
  return [...rows].sort((a, b) => a.rankOrder - b.rankOrder);
}

export interface ClusterView {
  cluster: number;
  representative: string;
  members: string[];
}

/** Group clustered rows; empty before a selection ran. */
export function buildClusterViews(scores: ScoresResponse | null): ClusterView[] {
  const groups = new Map<number, { representative: string; members: string[] }>();
  for (const row of scores?.frames ?? []) {
    if (row.cluster == null) continue;
    let group = groups.get(row.cluster);
    if (!group) {
      group = { representative: "", members: [] };
      groups.set(row.cluster, group);
    }
    group.members.push(row.id);
    if (row.is_representative) group.representative = row.id;
  }
  return [...groups.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([cluster, g]) => ({ cluster, ...g }));
}

/** Distinct, stable color per cluster index for badges and outlines. */
export function clusterColor(cluster: number): string {
  const hue = (cluster * 137.508) % 360; // golden angle keeps neighbors apart
  return `hsl(${hue.toFixed(1)}, 70%, 45%)`;
}
