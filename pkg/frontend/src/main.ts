/**
 * Browser entry point: wires the flow state machine and the renderers to
 * the DOM through one delegated click handler and one change handler.
 * All survey logic lives in screens.ts; this file only moves strings.
 */

import { Choice, SessionClient } from './api.js';
import { renderScreen } from './render.js';
import { SurveyFlow } from './screens.js';

function paint(root: HTMLElement, flow: SurveyFlow): void {
  root.innerHTML = renderScreen(flow.current());
  window.scrollTo(0, 0);
}

function showError(root: HTMLElement, err: unknown): void {
  const banner = document.createElement('div');
  banner.className = 'error-banner';
  banner.textContent =
    err instanceof Error ? err.message : 'Something went wrong; please retry.';
  root.prepend(banner);
}

/**
 * One agreement level per statement, 1-based.  Returns null (and marks the
 * offending fieldsets) while any open statement has no selection.
 */
function collectLevels(root: HTMLElement, count: number): number[] | null {
  const levels: number[] = [];
  let complete = true;
  for (let i = 0; i < count; i++) {
    const fieldset = root.querySelector(`fieldset[data-idx="${i}"]`);
    const checked = root.querySelector<HTMLInputElement>(
      `input[name="st${i}"]:checked`,
    );
    if (fieldset?.classList.contains('answered')) {
      levels.push(1); // placeholder; the flow skips answered statements
    } else if (checked) {
      fieldset?.classList.remove('missing');
      levels.push(Number(checked.value));
    } else {
      fieldset?.classList.add('missing');
      complete = false;
    }
  }
  return complete ? levels : null;
}

function collectProfile(root: HTMLElement): Record<string, string> | null {
  const profile: Record<string, string> = {};
  let complete = true;
  for (const select of root.querySelectorAll<HTMLSelectElement>(
    'select[data-field]',
  )) {
    const field = select.getAttribute('data-field') ?? '';
    if (select.value === '') {
      select.classList.add('missing');
      complete = false;
    } else {
      select.classList.remove('missing');
      profile[field] = select.value;
    }
  }
  return complete ? profile : null;
}

function start(): void {
  const root = document.getElementById('app');
  if (root === null) return;
  const client = new SessionClient('');
  const flow = new SurveyFlow(client);
  let busy = false;

  paint(root, flow);

  root.addEventListener('click', (event) => {
    const el = (event.target as HTMLElement).closest('[data-action]');
    if (el === null || el.tagName === 'SELECT' || busy) return;
    const action = el.getAttribute('data-action');
    busy = true;
    (async () => {
      switch (action) {
        case 'continue':
          await flow.advance();
          break;
        case 'choose':
          await flow.answer(el.getAttribute('data-choice') as Choice);
          break;
        case 'confirm':
          await flow.confirmReview();
          break;
        case 'refresh':
          await flow.refresh();
          break;
        case 'submit-texts': {
          const screen = flow.current();
          if (screen.kind !== 'TextStatements') return;
          const levels = collectLevels(root, screen.payload.statements.length);
          if (levels !== null) await flow.submitTexts(levels);
          return levels === null ? undefined : 'paint';
        }
        case 'submit-profile': {
          const profile = collectProfile(root);
          if (profile !== null) await flow.submitProfile(profile);
          return profile === null ? undefined : 'paint';
        }
        default:
          return;
      }
      return 'paint';
    })()
      .then((outcome) => {
        if (outcome === 'paint') paint(root, flow);
      })
      .catch((err) => showError(root, err))
      .finally(() => {
        busy = false;
      });
  });

  root.addEventListener('change', (event) => {
    const select = event.target as HTMLSelectElement;
    if (select.getAttribute('data-action') !== 'revise' || busy) return;
    const ref = select.getAttribute('data-ref') ?? '';
    busy = true;
    flow
      .revise(ref, select.value as Choice)
      .then(() => paint(root, flow))
      .catch((err) => showError(root, err))
      .finally(() => {
        busy = false;
      });
  });
}

document.addEventListener('DOMContentLoaded', start);
