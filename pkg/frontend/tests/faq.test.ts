import { afterEach, describe, expect, it } from 'vitest';
import { renderFaq } from '../src/pages/faq.js';
import { jsonResponse, mount, stubFetch } from './helpers.js';
import faqResult from './fixtures/faq_result.json';

afterEach(() => {
  document.body.innerHTML = '';
});

describe('FAQ page', () => {
  it('renders every pair from the API without numeric divergence', async () => {
    stubFetch(() => jsonResponse(faqResult));
    const root = mount();
    await renderFaq(root, 'T-faq');

    const rows = [...root.querySelectorAll('tbody tr')];
    expect(rows.length).toBe(faqResult.pairs.length);

    faqResult.pairs.forEach((pair, i) => {
      const cells = rows[i].querySelectorAll('td');
      expect(cells[0].textContent).toBe(pair.question);
      expect(cells[1].textContent).toBe(pair.answer);
      expect(cells[2].textContent).toBe(pair.score.toFixed(2));
      // Exact API value travels with the cell: zero client-side divergence.
      expect(cells[2].getAttribute('data-exact')).toBe(String(pair.score));
    });

    expect(root.innerHTML).toMatchSnapshot();
  });

  it('shows an empty state when the result has no pairs', async () => {
    stubFetch(() =>
      jsonResponse({ kind: 'faq_extraction', parameters: {}, pairs: [] }),
    );
    const root = mount();
    await renderFaq(root, 'T-empty');
    expect(root.textContent).toContain('No FAQs.');
    expect(root.querySelector('table')).toBeNull();
  });

  it('surfaces API errors inline', async () => {
    stubFetch(() =>
      jsonResponse(
        { error: { kind: 'TaskNotSucceeded', message: 'task is running' } },
        409,
      ),
    );
    const root = mount();
    await renderFaq(root, 'T-running');
    expect(root.querySelector('.error')?.textContent).toBe(
      'TaskNotSucceeded: task is running',
    );
  });
});
