/**
 * Annotation session state machine.
 *
 * Owns the verdict/category selection rules (category only with non-match,
 * submit only when the pair is valid), advances through the batch, and keeps
 * the current sample and selections intact when the connection drops so a
 * retry never loses or duplicates a label.
 */

import { ApiClient, ApiError } from './api.js';
import type {
  AnnotationSample,
  Category,
  DeviationReport,
  Progress,
  Verdict,
} from './types.js';

export type Phase = 'loading' | 'annotating' | 'submitting' | 'done' | 'error';

export interface SessionState {
  phase: Phase;
  sample: AnnotationSample | null;
  verdict: Verdict | null;
  category: Category | null;
  progress: Progress | null;
  deviation: DeviationReport | null;
  banner: string | null;      // connection-loss banner; retry() clears it
  validation: string | null;  // inline message from a 400 rejection
}

type Listener = (state: SessionState) => void;

export class AnnotationSession {
  readonly state: SessionState = {
    phase: 'loading',
    sample: null,
    verdict: null,
    category: null,
    progress: null,
    deviation: null,
    banner: null,
    validation: null,
  };

  private listeners: Listener[] = [];
  private pendingRetry: (() => Promise<void>) | null = null;

  constructor(
    private readonly api: ApiClient,
    readonly annotatorId: string,
  ) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  async start(): Promise<void> {
    await this.loadNext();
  }

  chooseVerdict(verdict: Verdict): void {
    if (this.state.phase !== 'annotating') return;
    this.state.verdict = verdict;
    if (verdict === 'match') this.state.category = null; // cleared before send
    this.state.validation = null;
    this.notify();
  }

  chooseCategory(category: Category): void {
    if (this.state.phase !== 'annotating') return;
    if (this.state.verdict !== 'non-match') return; // selector disabled otherwise
    this.state.category = category;
    this.state.validation = null;
    this.notify();
  }

  canSubmit(): boolean {
    if (this.state.phase !== 'annotating' || this.state.verdict === null) return false;
    return this.state.verdict === 'match' || this.state.category !== null;
  }

  async submit(): Promise<void> {
    if (!this.canSubmit() || !this.state.sample) return;
    const sample = this.state.sample;
    const verdict = this.state.verdict as Verdict;
    const category = verdict === 'non-match' ? this.state.category : null;
    this.state.phase = 'submitting';
    this.notify();
    try {
      const response = await this.api.submitLabel({
        sample_id: sample.sample_id,
        verdict,
        category,
        annotator_id: this.annotatorId,
      });
      this.state.progress = response.progress;
      await this.loadNext();
    } catch (error) {
      // rollback: same sample, same selections, nothing lost
      this.state.phase = 'annotating';
      this.state.sample = sample;
      this.state.verdict = verdict;
      this.state.category = category;
      if (error instanceof ApiError) {
        this.state.validation = error.detail;
      } else {
        this.state.banner = 'Connection lost. Your label is kept; press retry.';
        this.pendingRetry = () => this.submit();
      }
      this.notify();
    }
  }

  async loadNext(): Promise<void> {
    this.state.phase = 'loading';
    this.notify();
    try {
      const next = await this.api.next(this.annotatorId);
      this.state.progress = next.progress;
      this.state.banner = null;
      this.state.validation = null;
      if (next.done) {
        this.state.phase = 'done';
        this.state.sample = null;
        this.state.deviation = next.deviation ?? null;
      } else {
        this.state.phase = 'annotating';
        this.state.sample = next.sample ?? null;
        this.state.verdict = null;
        this.state.category = null;
      }
    } catch {
      this.state.phase = 'error';
      this.state.banner = 'Cannot reach the annotation service. Press retry.';
      this.pendingRetry = () => this.loadNext();
    }
    this.notify();
  }

  async retry(): Promise<void> {
    const pending = this.pendingRetry ?? (() => this.loadNext());
    this.pendingRetry = null;
    this.state.banner = null;
    await pending();
  }
}
