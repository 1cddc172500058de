// Response search page: query box plus top-k selector over a finished
// objection-mining task. Hits render in the exact order the API returned
// them; out-of-order responses are discarded by a sequence guard.

import { describeError, searchResponses, type SearchHitDoc } from '../api.js';
import { clear, el } from '../dom.js';
import { exact, score2 } from '../format.js';
import { L } from '../labels.js';
import { href } from '../router.js';
import { LatestWins } from '../seq.js';

const K_CHOICES = [5, 10, 20];

export function renderSearch(root: HTMLElement, taskId: string): void {
  const input = el('input', { type: 'text', placeholder: L.searchPlaceholder });
  const kSelect = el('select', {}, K_CHOICES.map((k) =>
    el('option', { value: String(k), text: `top ${k}`, ...(k === 10 ? { selected: '' } : {}) }),
  ));
  const submit = el('button', { type: 'submit', text: L.searchButton, disabled: '' });
  const form = el('form', { class: 'search-form' }, [input, kSelect, submit]);
  const results = el('div', { class: 'search-results' });

  root.append(
    el('a', { class: 'back', href: '#/', text: L.backToTasks }),
    el('h2', { text: L.searchHeading }),
    form,
    results,
  );

  input.addEventListener('input', () => {
    submit.disabled = input.value.trim() === '';
  });

  function renderHits(hits: SearchHitDoc[]): void {
    clear(results);
    if (hits.length === 0) {
      results.append(el('p', { class: 'hint', text: L.noHits }));
      return;
    }
    results.append(
      el('table', {}, [
        el('thead', {}, [
          el('tr', {}, [
            el('th', { text: L.colHit }),
            el('th', { text: L.colScore }),
            el('th', { text: L.colResponse }),
            el('th', { text: L.colCustomerQuery }),
            el('th', { text: L.colCluster }),
          ]),
        ]),
        el('tbody', {}, hits.map((hit) =>
          el('tr', { 'data-entry-id': String(hit.entry_id) }, [
            el('td', { text: String(hit.entry_id) }),
            el('td', { 'data-exact': exact(hit.score), text: score2(hit.score) }),
            el('td', { text: hit.response_text }),
            el('td', { text: hit.customer_query_text }),
            el('td', {}, [
              el('a', {
                href: href({ page: 'clusters', taskId }),
                'data-cluster-id': String(hit.cluster_id),
                text: `#${hit.cluster_id}`,
              }),
            ]),
          ]),
        )),
      ]),
    );
  }

  const guard = new LatestWins();

  form.addEventListener('submit', async (event) => {
    event.preventDefault();
    const query = input.value.trim();
    if (query === '') return;
    const token = guard.begin();
    try {
      const doc = await searchResponses(taskId, query, Number(kSelect.value));
      if (!guard.isCurrent(token)) return; // a newer search superseded this one
      renderHits(doc.hits);
    } catch (err) {
      if (!guard.isCurrent(token)) return;
      clear(results);
      results.append(el('p', { class: 'error', text: describeError(err) }));
    }
  });
}
