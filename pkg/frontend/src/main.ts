import { ApiClient } from './api';
import { PopularityChart } from './chart';
import { EndoExoMap } from './map';
import { CollectionPanel, MetadataPanel, PreviewPanel, WhatIfPanel } from './panels';
import { AppStore } from './state';

function mount(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing container #${id}`);
  return el;
}

async function boot(): Promise<void> {
  const api = new ApiClient();
  const store = new AppStore(api);

  new CollectionPanel(mount('collection-panel'), store);
  new EndoExoMap(mount('map-panel'), store);
  new PopularityChart(mount('popularity-panel'), store);
  new MetadataPanel(mount('metadata-panel'), store);
  new PreviewPanel(mount('preview-panel'), store);
  new WhatIfPanel(mount('whatif-panel'), store);

  await store.refreshCollections();
  const first = store.panels.collections[0];
  await store.setCollection(first ? first.name : 'demo');
}

void boot();
