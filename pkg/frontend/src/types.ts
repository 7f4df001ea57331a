/** Shared shapes for the annotation service API. */

export type Verdict = 'match' | 'non-match';

export const CATEGORIES = ['numerical', 'temporal', 'coreference', 'other'] as const;
export type Category = (typeof CATEGORIES)[number];

export interface AnnotationSample {
  sample_id: string;
  dataset_id: string;
  level: 'EM' | 'RM' | 'CM';
  doc_id: string;
  role: string;
  gold: string;
  predicted: string;
  document: string;
  event_type: string;
  evidence?: unknown;
  question?: string | null;
}

export interface LevelProgress {
  total: number;
  labeled: number;
}

export interface Progress {
  total: number;
  labeled: number;
  remaining: number;
  per_level: Record<string, LevelProgress>;
  per_annotator: Record<string, number>;
}

export interface DeviationProfile {
  dataset_id: string;
  e_em: number;
  e_rm: number;
  e_cm: number;
  n_em: number;
  n_rm: number;
  n_cm: number;
}

export interface DeviationReport {
  profile: DeviationProfile;
  alignment_percent: number;
  breakdown: Record<string, Record<string, number>>;
}

export interface NextResponse {
  done: boolean;
  sample?: AnnotationSample;
  progress: Progress;
  deviation?: DeviationReport;
}

export interface LabelPayload {
  sample_id: string;
  verdict: Verdict;
  category?: Category | null;
  annotator_id: string;
}

export interface LabelResponse {
  ok: boolean;
  progress: Progress;
}
