import { ApiRequestError } from './api';
import type { AppStore } from './state';

function row(label: string, value: string): HTMLElement {
  const div = document.createElement('div');
  div.className = 'meta-row';
  const k = document.createElement('span');
  k.className = 'meta-key';
  k.textContent = label;
  const v = document.createElement('span');
  v.className = 'meta-value';
  v.textContent = value;
  div.append(k, v);
  return div;
}

/** Metadata panel: renders the record fields of the active video. */
export class MetadataPanel {
  constructor(
    private readonly container: HTMLElement,
    private readonly store: AppStore,
  ) {
    store.subscribe(() => this.render());
  }

  render(): void {
    const meta = this.store.panels.metadata;
    this.container.replaceChildren();
    if (meta === null) return;
    this.container.append(
      row('id', meta.video_id),
      row('title', meta.title),
      row('author', meta.author),
      row('category', meta.category),
      row('uploaded', meta.upload_date),
      row('views total', String(meta.views_total)),
      row('shares total', String(meta.shares_total)),
    );
    if (meta.fitted && meta.params) {
      this.container.append(
        row('mu', String(meta.params.mu)),
        row('branching factor', String(meta.branching_factor)),
      );
      const point = this.store.selectedPoint();
      if (point !== null && point.endo_response !== null) {
        this.container.append(row('A', String(point.endo_response)));
      }
    }
  }
}

/** Preview panel: embeds the platform player for the active id. */
export class PreviewPanel {
  private frame: HTMLIFrameElement;

  constructor(
    container: HTMLElement,
    private readonly store: AppStore,
  ) {
    this.frame = document.createElement('iframe');
    this.frame.className = 'preview-frame';
    this.frame.setAttribute('allowfullscreen', '');
    container.appendChild(this.frame);
    store.subscribe(() => this.render());
  }

  render(): void {
    const url = this.store.previewEmbedUrl();
    const next = url ?? 'about:blank';
    if (this.frame.src !== next) this.frame.src = next;
  }
}

/** Collection menu plus the add-video form with a live job badge. */
export class CollectionPanel {
  private select: HTMLSelectElement;
  private jobBadge: HTMLElement;
  private errorLine: HTMLElement;

  constructor(
    container: HTMLElement,
    private readonly store: AppStore,
  ) {
    this.select = document.createElement('select');
    this.select.addEventListener('change', () => void store.setCollection(this.select.value));
    container.appendChild(this.select);

    const form = document.createElement('form');
    const input = document.createElement('input');
    input.placeholder = 'video ID or link';
    const button = document.createElement('button');
    button.textContent = 'add';
    form.append(input, button);
    container.appendChild(form);

    this.jobBadge = document.createElement('span');
    this.jobBadge.className = 'job-badge';
    container.appendChild(this.jobBadge);

    this.errorLine = document.createElement('div');
    this.errorLine.className = 'error-line';
    container.appendChild(this.errorLine);

    form.addEventListener('submit', (event) => {
      event.preventDefault();
      this.errorLine.textContent = '';
      void store.addVideo(input.value.trim()).catch((error: unknown) => {
        this.errorLine.textContent =
          error instanceof ApiRequestError ? error.message : String(error);
      });
    });

    store.subscribe(() => this.render());
  }

  render(): void {
    const { collections } = this.store.panels;
    this.select.replaceChildren();
    for (const c of collections) {
      const option = document.createElement('option');
      option.value = c.name;
      // default collections are read-only; mark them so in the menu
      option.textContent = c.default_flag ? `${c.name} (read-only)` : c.name;
      option.selected = c.name === this.store.active.collection;
      this.select.appendChild(option);
    }
    const job = this.store.panels.job;
    this.jobBadge.textContent = job ? `${job.video_id}: ${job.state}` : '';
  }
}

/** What-if control: a volume input posting stateless simulations. */
export class WhatIfPanel {
  private input: HTMLInputElement;
  private totalLine: HTMLElement;
  private errorLine: HTMLElement;

  constructor(
    container: HTMLElement,
    private readonly store: AppStore,
  ) {
    this.input = document.createElement('input');
    this.input.type = 'number';
    this.input.value = '0';
    const run = document.createElement('button');
    run.textContent = 'simulate promotion';
    const clear = document.createElement('button');
    clear.textContent = 'clear';
    container.append(this.input, run, clear);

    this.totalLine = document.createElement('div');
    this.totalLine.className = 'whatif-total';
    container.appendChild(this.totalLine);

    this.errorLine = document.createElement('div');
    this.errorLine.className = 'error-line';
    container.appendChild(this.errorLine);

    run.addEventListener('click', () => {
      this.errorLine.textContent = '';
      void this.store.runWhatIf(Number(this.input.value)).catch((error: unknown) => {
        // demotion overflow and friends surface inline
        this.errorLine.textContent =
          error instanceof ApiRequestError ? error.message : String(error);
      });
    });
    clear.addEventListener('click', () => this.store.clearWhatIf());

    store.subscribe(() => this.render());
  }

  render(): void {
    const display = this.store.incrementalTotalDisplay();
    this.totalLine.textContent =
      display === null ? '' : `incremental total views: ${display}`;
  }
}
