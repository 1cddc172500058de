// Objection clusters page: one row per cluster in API order; clicking a
// row opens a popup listing that cluster's sales responses grouped by the
// customer message they answered.

import { describeError, getResult, type ClusterDoc, type MiningResult } from '../api.js';
import { clear, el } from '../dom.js';
import { exact } from '../format.js';
import { L } from '../labels.js';

function buildPopup(cluster: ClusterDoc, onClose: () => void): HTMLElement {
  const memberBlocks = cluster.members.map((member) =>
    el('div', { class: 'member' }, [
      el('p', { class: 'member-text', text: member.text }),
      member.responses.length === 0
        ? el('p', { class: 'hint', text: L.noResponses })
        : el('ul', {}, member.responses.map((r) => el('li', { text: r.text }))),
    ]),
  );
  const closeButton = el('button', { class: 'popup-close', type: 'button', text: L.close });
  closeButton.addEventListener('click', onClose);
  const backdrop = el('div', { class: 'popup-backdrop' }, [
    el('div', { class: 'popup', 'data-cluster-id': String(cluster.cluster_id) }, [
      el('h3', { text: cluster.anchor_text }),
      el('p', { class: 'keywords', text: cluster.keywords.join(', ') }),
      el('p', { class: 'hint', text: L.popupResponsesHint }),
      ...memberBlocks,
      closeButton,
    ]),
  ]);
  backdrop.addEventListener('click', (event) => {
    if (event.target === backdrop) onClose();
  });
  return backdrop;
}

export async function renderClusters(root: HTMLElement, taskId: string): Promise<void> {
  root.append(
    el('a', { class: 'back', href: '#/', text: L.backToTasks }),
    el('h2', { text: L.clustersHeading }),
  );
  let doc: MiningResult;
  try {
    doc = await getResult<MiningResult>(taskId);
  } catch (err) {
    root.append(el('p', { class: 'error', text: describeError(err) }));
    return;
  }
  if (doc.clusters.length === 0) {
    root.append(el('p', { class: 'hint', text: L.noClusters }));
    return;
  }

  const popupHost = el('div', { class: 'popup-host' });

  function openPopup(cluster: ClusterDoc): void {
    clear(popupHost);
    popupHost.append(buildPopup(cluster, () => clear(popupHost)));
  }

  root.append(
    el('table', { class: 'clickable' }, [
      el('thead', {}, [
        el('tr', {}, [
          el('th', { text: L.colAnchor }),
          el('th', { text: L.colFrequency }),
          el('th', { text: L.colRelevance }),
          el('th', { text: L.colKeywords }),
        ]),
      ]),
      el('tbody', {}, doc.clusters.map((cluster) => {
        const row = el('tr', { 'data-cluster-id': String(cluster.cluster_id) }, [
          el('td', { text: cluster.anchor_text }),
          el('td', { 'data-exact': exact(cluster.frequency), text: exact(cluster.frequency) }),
          el('td', {
            'data-exact': exact(cluster.mean_relevance),
            text: exact(cluster.mean_relevance),
          }),
          el('td', { text: cluster.keywords.join(', ') }),
        ]);
        row.addEventListener('click', () => openPopup(cluster));
        return row;
      })),
    ]),
    popupHost,
  );
}
