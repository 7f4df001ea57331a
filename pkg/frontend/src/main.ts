/** DOM wiring for the annotation page; all rendering goes through textContent. */

import { ApiClient } from './api.js';
import { segmentDocument } from './highlight.js';
import { applyAction, mapKey } from './keyboard.js';
import { AnnotationSession, type SessionState } from './state.js';
import { CATEGORIES, type Category } from './types.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderDocument(container: HTMLElement, state: SessionState): void {
  const sample = state.sample;
  if (!sample) return;
  const segments = segmentDocument(sample.document, [
    { text: sample.gold, label: 'gold' },
    { text: sample.predicted, label: 'predicted' },
  ]);
  for (const segment of segments) {
    if (segment.mark) {
      const mark = el('mark', `hl-${segment.mark}`, segment.text);
      container.appendChild(mark);
    } else {
      container.appendChild(document.createTextNode(segment.text));
    }
  }
}

function renderAnnotating(root: HTMLElement, session: AnnotationSession): void {
  const state = session.state;
  const sample = state.sample;
  if (!sample) return;
  const progress = state.progress;

  const header = el('div', 'header');
  header.appendChild(el('span', `badge badge-${sample.level.toLowerCase()}`, sample.level));
  header.appendChild(el('span', 'meta', `${sample.dataset_id} · ${sample.doc_id} · ${sample.role}`));
  if (progress) {
    header.appendChild(el('span', 'progress', `${progress.labeled} / ${progress.total} labeled`));
  }
  root.appendChild(header);

  const doc = el('div', 'document');
  renderDocument(doc, state);
  root.appendChild(doc);

  const facts = el('dl', 'facts');
  const fact = (term: string, value: string) => {
    facts.appendChild(el('dt', undefined, term));
    facts.appendChild(el('dd', undefined, value));
  };
  fact('event type', sample.event_type);
  fact('role', sample.role);
  if (sample.question) fact('question', sample.question);
  fact('reference argument', sample.gold);
  fact('predicted argument', sample.predicted);
  root.appendChild(facts);

  const verdictRow = el('div', 'row verdicts');
  for (const verdict of ['match', 'non-match'] as const) {
    const button = el('button', state.verdict === verdict ? 'selected' : '',
      verdict === 'match' ? 'match (m)' : 'non-match (n)');
    button.onclick = () => session.chooseVerdict(verdict);
    verdictRow.appendChild(button);
  }
  root.appendChild(verdictRow);

  const categoryRow = el('div', 'row categories');
  CATEGORIES.forEach((category: Category, index: number) => {
    const button = el('button', state.category === category ? 'selected' : '',
      `${category} (${index + 1})`);
    button.disabled = state.verdict !== 'non-match'; // enabled iff non-match
    button.onclick = () => session.chooseCategory(category);
    categoryRow.appendChild(button);
  });
  root.appendChild(categoryRow);

  if (state.validation) {
    root.appendChild(el('div', 'validation', state.validation));
  }

  const submit = el('button', 'submit', 'submit (enter)');
  submit.disabled = !session.canSubmit();
  submit.onclick = () => void session.submit();
  root.appendChild(submit);
}

function renderDone(root: HTMLElement, state: SessionState): void {
  root.appendChild(el('h2', undefined, 'Batch complete'));
  const deviation = state.deviation;
  if (deviation) {
    const list = el('dl', 'facts');
    const profile = deviation.profile;
    const rows: [string, number, number][] = [
      ['EM deviation', profile.e_em, profile.n_em],
      ['RM deviation', profile.e_rm, profile.n_rm],
      ['CM deviation', profile.e_cm, profile.n_cm],
    ];
    for (const [label, rate, n] of rows) {
      list.appendChild(el('dt', undefined, label));
      list.appendChild(el('dd', undefined, `${(100 * rate).toFixed(2)}% (n=${n})`));
    }
    list.appendChild(el('dt', undefined, 'alignment'));
    list.appendChild(el('dd', undefined, `${deviation.alignment_percent.toFixed(2)}%`));
    root.appendChild(list);
  }
  if (state.progress) {
    root.appendChild(el('p', 'meta',
      `${state.progress.labeled} of ${state.progress.total} samples labeled.`));
  }
}

function render(root: HTMLElement, session: AnnotationSession): void {
  root.replaceChildren();
  const state = session.state;
  if (state.banner) {
    const banner = el('div', 'banner');
    banner.appendChild(el('span', undefined, state.banner));
    const retry = el('button', undefined, 'retry');
    retry.onclick = () => void session.retry();
    banner.appendChild(retry);
    root.appendChild(banner);
  }
  if (state.phase === 'done') {
    renderDone(root, state);
  } else if (state.phase === 'annotating' || state.phase === 'submitting') {
    renderAnnotating(root, session);
  } else if (state.phase === 'loading') {
    root.appendChild(el('p', 'meta', 'loading…'));
  }
}

function annotatorId(): string {
  const stored = window.localStorage.getItem('annotator_id');
  if (stored) return stored;
  const entered = window.prompt('annotator id?') || `anon-${Date.now()}`;
  window.localStorage.setItem('annotator_id', entered);
  return entered;
}

export function boot(): void {
  const root = document.getElementById('app');
  if (!root) return;
  const session = new AnnotationSession(new ApiClient(''), annotatorId());
  session.subscribe(() => render(root, session));
  window.addEventListener('keydown', (event) => {
    if (event.target instanceof HTMLInputElement) return;
    applyAction(session, mapKey(event.key));
  });
  void session.start();
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  boot();
}
