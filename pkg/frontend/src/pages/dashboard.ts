// Manager dashboard: trigger/team/staff tabs over one dashboard result.
// The result is fetched once; tab switches re-render from the cached
// document. Row order and every number come straight from the API.

import {
  describeError,
  getResult,
  type DashboardResult,
  type DashboardView,
} from '../api.js';
import { clear, el } from '../dom.js';
import { barWidth, exact } from '../format.js';
import { L } from '../labels.js';

const VIEWS: DashboardView[] = ['trigger', 'team', 'staff'];

export async function renderDashboard(root: HTMLElement, taskId: string): Promise<void> {
  root.append(
    el('a', { class: 'back', href: '#/', text: L.backToTasks }),
    el('h2', { text: L.dashboardHeading }),
  );
  let doc: DashboardResult;
  try {
    doc = await getResult<DashboardResult>(taskId);
  } catch (err) {
    root.append(el('p', { class: 'error', text: describeError(err) }));
    return;
  }

  const tabButtons = new Map<DashboardView, HTMLButtonElement>();
  const tabbar = el('div', { class: 'tabs' });
  const content = el('div', { class: 'tab-content' });

  function show(view: DashboardView): void {
    for (const [name, button] of tabButtons) {
      button.classList.toggle('active', name === view);
    }
    clear(content);
    content.append(
      el('table', { 'data-view': view }, [
        el('thead', {}, [
          el('tr', {}, [
            el('th', { text: L.colKey }),
            el('th', { text: L.colTriggered }),
            el('th', { text: L.colExecuted }),
            el('th', { text: L.colRatio }),
          ]),
        ]),
        el('tbody', {}, doc.views[view].map((row) =>
          el('tr', { 'data-key': row.key }, [
            el('td', { text: row.key }),
            el('td', { 'data-exact': exact(row.triggered), text: exact(row.triggered) }),
            el('td', { 'data-exact': exact(row.executed), text: exact(row.executed) }),
            el('td', { 'data-exact': exact(row.ratio) }, [
              el('span', { class: 'bar' }, [
                el('span', { class: 'bar-fill', style: `width: ${barWidth(row.ratio)}` }),
              ]),
              el('span', { class: 'ratio-num', text: exact(row.ratio) }),
            ]),
          ]),
        )),
      ]),
    );
  }

  for (const view of VIEWS) {
    const button = el('button', { class: 'tab', type: 'button', text: L.tabs[view] });
    button.addEventListener('click', () => show(view));
    tabButtons.set(view, button);
    tabbar.append(button);
  }

  root.append(tabbar, content);
  show('trigger');
}
