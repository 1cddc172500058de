// FAQ results page: a static table of question/answer pairs in API order.

import { describeError, getResult, type FaqResult } from '../api.js';
import { el } from '../dom.js';
import { exact, score2 } from '../format.js';
import { L } from '../labels.js';

export async function renderFaq(root: HTMLElement, taskId: string): Promise<void> {
  root.append(
    el('a', { class: 'back', href: '#/', text: L.backToTasks }),
    el('h2', { text: L.faqHeading }),
  );
  let doc: FaqResult;
  try {
    doc = await getResult<FaqResult>(taskId);
  } catch (err) {
    root.append(el('p', { class: 'error', text: describeError(err) }));
    return;
  }
  if (doc.pairs.length === 0) {
    root.append(el('p', { class: 'hint', text: L.noFaqs }));
    return;
  }
  root.append(
    el('table', {}, [
      el('thead', {}, [
        el('tr', {}, [
          el('th', { text: L.colQuestion }),
          el('th', { text: L.colAnswer }),
          el('th', { text: L.colScore }),
        ]),
      ]),
      el('tbody', {}, doc.pairs.map((pair) =>
        el('tr', {}, [
          el('td', { text: pair.question }),
          el('td', { text: pair.answer }),
          el('td', { 'data-exact': exact(pair.score), text: score2(pair.score) }),
        ]),
      )),
    ]),
  );
}
