// Shapes of what the engine's HTTP API returns (docs/formats.md).

export interface ActionRecord {
  seq: number;
  timestamp: string;
  kind: "speak" | "stay_silent" | "ask_question" | "store_only" | "run_recall" | "run_summary";
  addressee: string;
  text: string;
  supporting_ids: string[];
}

export interface SpeakerInfo {
  id: string;
  name: string;
  role: string;
  samples: number;
}

export interface ClusterInfo {
  id: string;
  samples: number;
}

export interface ActivityLabelRow {
  label: string;
  t_start: string;
  t_end: string;
  origin: string;
}

export interface Stats {
  date: string;
  occupancy_seconds: Record<string, number>;
  sedentarization: number;
  activity_labels: ActivityLabelRow[];
  speakers: SpeakerInfo[];
  clusters: ClusterInfo[];
  latest_pose: string | null;
  session: string;
  actions: number;
  mean_owner_voice_score: number | null;
  egress_invocations: number;
}

export interface TranscriptRow {
  session: string;
  speaker: string;
  t_start: number;
  t_end: number;
  text: string;
  tags: string[];
}

export interface MemoryHit {
  rank: number;
  item_id: string;
  similarity: number;
  source: string;
  text: string;
}

export type SummaryResult =
  | { kind: "summary"; role: string; text: string }
  | { kind: "denied"; role: string }
  | { kind: "error"; status: number; raw: string };
