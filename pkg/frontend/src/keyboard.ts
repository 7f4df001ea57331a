/** Keyboard shortcuts: m / n set the verdict, 1-4 pick a category, Enter submits. */

import { CATEGORIES, type Category, type Verdict } from './types.js';

export type KeyAction =
  | { type: 'verdict'; verdict: Verdict }
  | { type: 'category'; category: Category }
  | { type: 'submit' }
  | null;

export function mapKey(key: string): KeyAction {
  switch (key.toLowerCase()) {
    case 'm':
      return { type: 'verdict', verdict: 'match' };
    case 'n':
      return { type: 'verdict', verdict: 'non-match' };
    case 'enter':
      return { type: 'submit' };
    default: {
      const index = Number.parseInt(key, 10);
      if (index >= 1 && index <= CATEGORIES.length) {
        return { type: 'category', category: CATEGORIES[index - 1] };
      }
      return null;
    }
  }
}

/** Route one action into the session; same code path the buttons use. */
export function applyAction(
  session: {
    chooseVerdict(v: Verdict): void;
    chooseCategory(c: Category): void;
    submit(): Promise<void>;
  },
  action: KeyAction,
): void {
  if (!action) return;
  if (action.type === 'verdict') session.chooseVerdict(action.verdict);
  else if (action.type === 'category') session.chooseCategory(action.category);
  else void session.submit();
}
