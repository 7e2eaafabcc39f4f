/**
 * Screen-level state machine for one respondent session.
 *
 * Three fixed instruction screens run client-side; everything after them
 * is driven entirely by the service's next-payload, so ordering stays
 * server-side.  Each mutation returns the follow-up screen from the same
 * round trip, keeping the client one request per interaction.
 */

import {
  ApiError,
  Choice,
  DonePayload,
  NextPayload,
  ProfilePayload,
  QuestionPayload,
  ReviewPayload,
  SurveyApi,
  TextPayload,
} from './api.js';

export type Screen =
  | { kind: 'Instructions1' }
  | { kind: 'Instructions2' }
  | { kind: 'Instructions3' }
  | { kind: 'Question'; payload: QuestionPayload }
  | { kind: 'BlockReview'; payload: ReviewPayload; editable: boolean }
  | { kind: 'TextStatements'; payload: TextPayload }
  | { kind: 'Demographics'; payload: ProfilePayload }
  | { kind: 'Done'; payload: DonePayload };

export class SurveyFlow {
  private client: SurveyApi;
  private screen: Screen = { kind: 'Instructions1' };
  private sessionId: string | null = null;

  constructor(client: SurveyApi) {
    this.client = client;
  }

  current(): Screen {
    return this.screen;
  }

  session(): string | null {
    return this.sessionId;
  }

  private requireSession(): string {
    if (this.sessionId === null) throw new Error('no active session');
    return this.sessionId;
  }

  private toScreen(payload: NextPayload): Screen {
    switch (payload.kind) {
      case 'question':
        return { kind: 'Question', payload };
      case 'review':
        return { kind: 'BlockReview', payload, editable: true };
      case 'text':
        return { kind: 'TextStatements', payload };
      case 'profile':
        return { kind: 'Demographics', payload };
      case 'done':
        return { kind: 'Done', payload };
    }
  }

  /** Advance past an instruction screen; the third one opens the session. */
  async advance(): Promise<Screen> {
    switch (this.screen.kind) {
      case 'Instructions1':
        this.screen = { kind: 'Instructions2' };
        break;
      case 'Instructions2':
        this.screen = { kind: 'Instructions3' };
        break;
      case 'Instructions3': {
        const created = await this.client.createSession();
        this.sessionId = created.sessionId;
        this.screen = this.toScreen(created.next);
        break;
      }
      default:
        throw new Error(`cannot advance from ${this.screen.kind}`);
    }
    return this.screen;
  }

  /** Re-sync with the service, e.g. after a reload mid-session. */
  async refresh(): Promise<Screen> {
    const next = await this.client.next(this.requireSession());
    this.screen = this.toScreen(next);
    return this.screen;
  }

  async answer(choice: Choice): Promise<Screen> {
    if (this.screen.kind !== 'Question') {
      throw new Error('no comparison question on screen');
    }
    const result = await this.client.submitAnswer(
      this.requireSession(),
      this.screen.payload.ref,
      choice,
    );
    this.screen = this.toScreen(result.next);
    return this.screen;
  }

  /**
   * Change one answer from the review screen.  A closed review window is
   * not an error from the respondent's point of view: the screen simply
   * becomes read-only.
   */
  async revise(ref: string, choice: Choice): Promise<Screen> {
    if (this.screen.kind !== 'BlockReview') {
      throw new Error('no review on screen');
    }
    const review = this.screen;
    try {
      const result = await this.client.reviseAnswer(
        this.requireSession(),
        ref,
        choice,
      );
      this.screen = this.toScreen(result.next);
    } catch (err) {
      if (err instanceof ApiError && err.errorName === 'ReviewWindowClosed') {
        this.screen = { ...review, editable: false };
      } else {
        throw err;
      }
    }
    return this.screen;
  }

  async confirmReview(): Promise<Screen> {
    if (this.screen.kind !== 'BlockReview') {
      throw new Error('no review on screen');
    }
    const result = await this.client.confirmReview(
      this.requireSession(),
      this.screen.payload.block_ref,
    );
    this.screen = this.toScreen(result.next);
    return this.screen;
  }

  /**
   * Submit one agreement level per statement, in payload order.  Levels
   * are 1-based indices into each statement's label list; statements the
   * service already has answers for are skipped.
   */
  async submitTexts(levels: number[]): Promise<Screen> {
    if (this.screen.kind !== 'TextStatements') {
      throw new Error('no statements on screen');
    }
    const payload = this.screen.payload;
    if (levels.length !== payload.statements.length) {
      throw new Error(
        `expected ${payload.statements.length} levels, got ${levels.length}`,
      );
    }
    const sid = this.requireSession();
    const answered = new Set(payload.answered);
    let next: NextPayload | null = null;
    for (let i = 0; i < payload.statements.length; i++) {
      const statement = payload.statements[i];
      if (answered.has(statement.code)) continue;
      const result = await this.client.submitText(
        sid,
        statement.code,
        levels[i],
      );
      next = result.next;
    }
    if (next !== null) this.screen = this.toScreen(next);
    return this.screen;
  }

  async submitProfile(profile: Record<string, string>): Promise<Screen> {
    if (this.screen.kind !== 'Demographics') {
      throw new Error('no profile form on screen');
    }
    const result = await this.client.submitProfile(
      this.requireSession(),
      profile,
    );
    this.screen = this.toScreen(result.next);
    return this.screen;
  }
}
