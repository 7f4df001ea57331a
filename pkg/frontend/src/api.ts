/** Thin typed client for the annotation service endpoints. */

import type {
  DeviationReport,
  LabelPayload,
  LabelResponse,
  NextResponse,
  Progress,
} from './types.js';

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function readDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? response.statusText;
  } catch {
    return response.statusText;
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path);
    if (!response.ok) throw new ApiError(response.status, await readDetail(response));
    return (await response.json()) as T;
  }

  next(annotatorId: string): Promise<NextResponse> {
    return this.get<NextResponse>(`/api/next?annotator=${encodeURIComponent(annotatorId)}`);
  }

  progress(): Promise<Progress> {
    return this.get<Progress>('/api/progress');
  }

  deviation(): Promise<DeviationReport> {
    return this.get<DeviationReport>('/api/deviation');
  }

  async submitLabel(payload: LabelPayload): Promise<LabelResponse> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/label`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    });
    if (!response.ok) throw new ApiError(response.status, await readDetail(response));
    return (await response.json()) as LabelResponse;
  }
}
