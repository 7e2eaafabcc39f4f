/**
 * Pure HTML renderers, one per screen kind.
 *
 * Every renderer maps a Screen to a markup string with no DOM access, so
 * the full flow can be exercised headlessly.  Interactive elements carry
 * data-action attributes for the event delegation in main.ts.  Respondent
 * facing content is limited to income vectors, statement texts and level
 * labels; statements are addressed by position (data-idx), never by code.
 */

import {
  ProfileField,
  QuestionPayload,
  ReviewEntry,
  TextStatement,
} from './api.js';
import { escapeAttr, escapeHtml, incomeVector, readingAid } from './format.js';
import { Screen } from './screens.js';
import {
  INSTRUCTIONS_1,
  INSTRUCTIONS_2,
  INSTRUCTIONS_3,
  QUESTION_PROMPT,
} from './texts.js';

const CONTINUE_BUTTON =
  '<button type="button" class="primary" data-action="continue">Continue</button>';

function paragraphs(lines: string[]): string {
  return lines.map((p) => `<p>${escapeHtml(p)}</p>`).join('\n  ');
}

function renderInstructions1(): string {
  return `<section class="screen screen-instructions">
  <h1>${escapeHtml(INSTRUCTIONS_1.title)}</h1>
  ${paragraphs(INSTRUCTIONS_1.paragraphs)}
  ${CONTINUE_BUTTON}
</section>`;
}

function renderInstructions2(): string {
  return `<section class="screen screen-instructions">
  <h1>${escapeHtml(INSTRUCTIONS_2.title)}</h1>
  ${paragraphs(INSTRUCTIONS_2.paragraphs)}
  ${CONTINUE_BUTTON}
</section>`;
}

function sampleQuestion(): string {
  const { a, b } = INSTRUCTIONS_3.sample;
  return `<div class="sample-question">
    <p class="prompt">${escapeHtml(QUESTION_PROMPT)}</p>
    <div class="choices choices-static">
      <div class="choice"><span class="choice-name">Distribution A</span>
        <span class="choice-incomes">${incomeVector(a)}</span></div>
      <div class="choice"><span class="choice-name">Equivalent</span></div>
      <div class="choice"><span class="choice-name">Distribution B</span>
        <span class="choice-incomes">${incomeVector(b)}</span></div>
    </div>
    <p class="reading-aid">${escapeHtml(readingAid(a))}</p>
  </div>`;
}

function renderInstructions3(): string {
  const bullets = INSTRUCTIONS_3.bullets
    .map((b) => `<li>${escapeHtml(b)}</li>`)
    .join('\n    ');
  return `<section class="screen screen-instructions">
  <h1>${escapeHtml(INSTRUCTIONS_3.title)}</h1>
  ${paragraphs(INSTRUCTIONS_3.paragraphs)}
  <ul>
    ${bullets}
  </ul>
  <p>${escapeHtml(INSTRUCTIONS_3.sample.heading)}</p>
  ${sampleQuestion()}
  <p>${escapeHtml(INSTRUCTIONS_3.closing)}</p>
  ${CONTINUE_BUTTON}
</section>`;
}

function renderQuestion(q: QuestionPayload): string {
  return `<section class="screen screen-question">
  <p class="progress">Question ${q.number} of ${q.total}</p>
  <h2 class="prompt">${escapeHtml(QUESTION_PROMPT)}</h2>
  <div class="choices">
    <button type="button" class="choice" data-action="choose" data-choice="A">
      <span class="choice-name">Distribution A</span>
      <span class="choice-incomes">${incomeVector(q.a)}</span>
    </button>
    <button type="button" class="choice" data-action="choose" data-choice="Equivalent">
      <span class="choice-name">Equivalent</span>
    </button>
    <button type="button" class="choice" data-action="choose" data-choice="B">
      <span class="choice-name">Distribution B</span>
      <span class="choice-incomes">${incomeVector(q.b)}</span>
    </button>
  </div>
  <p class="reading-aid">${escapeHtml(readingAid(q.a))}</p>
</section>`;
}

function reviewRow(entry: ReviewEntry, i: number, editable: boolean): string {
  const options = (['A', 'Equivalent', 'B'] as const)
    .map((c) => {
      const shown = c === 'A' || c === 'B' ? `Distribution ${c}` : c;
      const selected = c === entry.choice ? ' selected' : '';
      return `<option value="${c}"${selected}>${shown}</option>`;
    })
    .join('');
  const disabled = editable ? '' : ' disabled';
  return `<tr>
      <td>Question ${i + 1}</td>
      <td>${incomeVector(entry.a)}</td>
      <td>${incomeVector(entry.b)}</td>
      <td><select data-action="revise" data-ref="${escapeAttr(entry.ref)}"${disabled}>${options}</select></td>
    </tr>`;
}

function renderReview(entries: ReviewEntry[], editable: boolean): string {
  const rows = entries
    .map((entry, i) => reviewRow(entry, i, editable))
    .join('\n    ');
  const note = editable
    ? 'Here are your answers to this group of questions. If you wish, you ' +
      'can change them before continuing.'
    : 'This group has been confirmed; answers can no longer be changed.';
  const action = editable
    ? '<button type="button" class="primary" data-action="confirm">Confirm these answers</button>'
    : '<button type="button" class="primary" data-action="refresh">Continue</button>';
  return `<section class="screen screen-review">
  <h2>Your answers</h2>
  <p>${escapeHtml(note)}</p>
  <table class="review-table">
    <thead><tr><th></th><th>Distribution A</th><th>Distribution B</th><th>Your answer</th></tr></thead>
    <tbody>
    ${rows}
    </tbody>
  </table>
  ${action}
</section>`;
}

function statementFieldset(
  statement: TextStatement,
  i: number,
  answered: boolean,
): string {
  const disabled = answered ? ' disabled' : '';
  const inputs = statement.levels
    .map(
      (level, j) =>
        `<label class="level"><input type="radio" name="st${i}" value="${j + 1}"${disabled}><span>${escapeHtml(level)}</span></label>`,
    )
    .join('\n      ');
  return `<fieldset class="statement${answered ? ' answered' : ''}" data-idx="${i}">
    <legend>Statement ${i + 1}</legend>
    <p class="statement-text">${escapeHtml(statement.text)}</p>
    <div class="levels">
      ${inputs}
    </div>
  </fieldset>`;
}

function renderTextStatements(
  statements: TextStatement[],
  answeredCodes: string[],
): string {
  const answered = new Set(answeredCodes);
  const sets = statements
    .map((s, i) => statementFieldset(s, i, answered.has(s.code)))
    .join('\n  ');
  const intro =
    'Here again we are considering a fictive society consisting of ' +
    'perfectly identical individuals: there is still no reason to favour ' +
    'one individual over another. You are asked to indicate the extent to ' +
    'which you agree with a number of statements concerning the impact on ' +
    'inequality of different ways of redistributing income between ' +
    'individuals.';
  return `<section class="screen screen-statements">
  <h1>Part Two</h1>
  <p>${escapeHtml(intro)}</p>
  ${sets}
  <button type="button" class="primary" data-action="submit-texts">Continue</button>
</section>`;
}

function fieldName(name: string): string {
  const words = name.replace(/_/g, ' ');
  return words.charAt(0).toUpperCase() + words.slice(1);
}

function profileSelect(field: ProfileField): string {
  const options = field.categories
    .map((c) => `<option value="${escapeAttr(c)}">${escapeHtml(c)}</option>`)
    .join('');
  return `<div class="profile-field">
    <label for="pf-${escapeAttr(field.name)}">${escapeHtml(fieldName(field.name))}</label>
    <select id="pf-${escapeAttr(field.name)}" data-field="${escapeAttr(field.name)}" required>
      <option value="">Select...</option>${options}
    </select>
  </div>`;
}

function renderDemographics(fields: ProfileField[]): string {
  const selects = fields.map(profileSelect).join('\n  ');
  const intro =
    'To conclude, we will ask you a series of personal questions to help ' +
    'us situate you in French society. Your answers remain anonymous and ' +
    'confidential.';
  return `<section class="screen screen-profile">
  <h1>Part Three</h1>
  <p>${escapeHtml(intro)}</p>
  ${selects}
  <button type="button" class="primary" data-action="submit-profile">Finish</button>
</section>`;
}

function renderDone(): string {
  return `<section class="screen screen-done">
  <h1>Thank you for your participation</h1>
  <p>Your answers have been recorded. When we have completed our survey,
  you will receive an e-mail with a link to the results. You may now close
  this window.</p>
</section>`;
}

export function renderScreen(screen: Screen): string {
  switch (screen.kind) {
    case 'Instructions1':
      return renderInstructions1();
    case 'Instructions2':
      return renderInstructions2();
    case 'Instructions3':
      return renderInstructions3();
    case 'Question':
      return renderQuestion(screen.payload);
    case 'BlockReview':
      return renderReview(screen.payload.entries, screen.editable);
    case 'TextStatements':
      return renderTextStatements(
        screen.payload.statements,
        screen.payload.answered,
      );
    case 'Demographics':
      return renderDemographics(screen.payload.fields);
    case 'Done':
      return renderDone();
  }
}
