/**
 * Wire types and HTTP client for the survey service.
 *
 * The service addresses questions by per-session refs (q01..q44) and
 * blocks by position (b1..b4); payloads carry income vectors and nothing
 * else, so nothing in this module ever sees catalog metadata.
 */

export type Choice = 'A' | 'Equivalent' | 'B';

export interface QuestionPayload {
  kind: 'question';
  ref: string;
  number: number;
  total: number;
  a: number[];
  b: number[];
}

export interface ReviewEntry {
  ref: string;
  a: number[];
  b: number[];
  choice: Choice;
}

export interface ReviewPayload {
  kind: 'review';
  block_ref: string;
  entries: ReviewEntry[];
}

export interface TextStatement {
  code: string;
  text: string;
  levels: string[];
}

export interface TextPayload {
  kind: 'text';
  statements: TextStatement[];
  answered: string[];
}

export interface ProfileField {
  name: string;
  categories: string[];
}

export interface ProfilePayload {
  kind: 'profile';
  fields: ProfileField[];
}

export interface DonePayload {
  kind: 'done';
  error_count: number;
}

export type NextPayload =
  | QuestionPayload
  | ReviewPayload
  | TextPayload
  | ProfilePayload
  | DonePayload;

export interface MutationResult {
  status: string;
  next: NextPayload;
}

export interface SessionStatus {
  session_id: string;
  phase: string;
  answered: number;
  error_count: number | null;
}

/** The client surface the flow machine depends on. */
export interface SurveyApi {
  createSession(
    seed?: number,
  ): Promise<{ sessionId: string; next: NextPayload }>;
  next(sessionId: string): Promise<NextPayload>;
  submitAnswer(
    sessionId: string,
    ref: string,
    choice: Choice,
  ): Promise<MutationResult>;
  reviseAnswer(
    sessionId: string,
    ref: string,
    choice: Choice,
  ): Promise<MutationResult>;
  confirmReview(sessionId: string, blockRef: string): Promise<MutationResult>;
  submitText(
    sessionId: string,
    statement: string,
    level: number,
  ): Promise<MutationResult>;
  submitProfile(
    sessionId: string,
    profile: Record<string, string>,
  ): Promise<MutationResult>;
  status(sessionId: string): Promise<SessionStatus>;
}

/** Error raised for any non-2xx response, carrying the service's detail. */
export class ApiError extends Error {
  status: number;
  detail: string;
  errorName?: string;

  constructor(status: number, detail: string, errorName?: string) {
    super(`${status}: ${detail}`);
    this.name = 'ApiError';
    this.status = status;
    this.detail = detail;
    this.errorName = errorName;
  }
}

export class SessionClient implements SurveyApi {
  private baseUrl: string;

  constructor(baseUrl = '') {
    this.baseUrl = baseUrl.replace(/\/$/, '');
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const res = await fetch(`${this.baseUrl}${path}`, init);
    if (!res.ok) {
      const body = (await res.json().catch(() => ({}))) as {
        detail?: unknown;
        error?: string;
      };
      const detail =
        typeof body.detail === 'string'
          ? body.detail
          : JSON.stringify(body.detail ?? '');
      throw new ApiError(res.status, detail, body.error);
    }
    return res.json();
  }

  private post(path: string, body?: unknown): Promise<unknown> {
    return this.request(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  async createSession(
    seed?: number,
  ): Promise<{ sessionId: string; next: NextPayload }> {
    const body = (await this.post(
      '/sessions',
      seed === undefined ? undefined : { seed },
    )) as { session_id: string; next: NextPayload };
    return { sessionId: body.session_id, next: body.next };
  }

  async next(sessionId: string): Promise<NextPayload> {
    return (await this.request(
      `/sessions/${sessionId}/next`,
    )) as NextPayload;
  }

  /**
   * Record one comparison answer.  The service deduplicates repeats of a
   * delivered answer, so a network failure is retried once: at worst the
   * retry reports status "duplicate" and no second record is created.
   */
  async submitAnswer(
    sessionId: string,
    ref: string,
    choice: Choice,
  ): Promise<MutationResult> {
    const path = `/sessions/${sessionId}/answers`;
    const body = { question_id: ref, choice };
    try {
      return (await this.post(path, body)) as MutationResult;
    } catch (err) {
      if (err instanceof ApiError) throw err;
      return (await this.post(path, body)) as MutationResult;
    }
  }

  async reviseAnswer(
    sessionId: string,
    ref: string,
    choice: Choice,
  ): Promise<MutationResult> {
    return (await this.request(`/sessions/${sessionId}/answers/${ref}`, {
      method: 'PUT',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ choice }),
    })) as MutationResult;
  }

  async confirmReview(
    sessionId: string,
    blockRef: string,
  ): Promise<MutationResult> {
    return (await this.post(
      `/sessions/${sessionId}/review/${blockRef}/confirm`,
    )) as MutationResult;
  }

  async submitText(
    sessionId: string,
    statement: string,
    level: number,
  ): Promise<MutationResult> {
    return (await this.post(`/sessions/${sessionId}/text`, {
      statement,
      level,
    })) as MutationResult;
  }

  async submitProfile(
    sessionId: string,
    profile: Record<string, string>,
  ): Promise<MutationResult> {
    return (await this.post(`/sessions/${sessionId}/profile`, {
      profile,
    })) as MutationResult;
  }

  async status(sessionId: string): Promise<SessionStatus> {
    return (await this.request(
      `/sessions/${sessionId}/status`,
    )) as SessionStatus;
  }
}
