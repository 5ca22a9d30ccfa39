import {
  bubbleGeometry,
  fitViewport,
  panViewport,
  toPixels,
  zoomViewport,
  type Viewport,
} from './geometry';
import type { AppStore } from './state';
import type { EndoExoPoint } from './types';

const SVG_NS = 'http://www.w3.org/2000/svg';
const WIDTH = 520;
const HEIGHT = 400;

function tooltipText(p: EndoExoPoint): string {
  const lines = [
    p.video_id,
    p.title ? `title: ${p.title}` : null,
    p.author ? `author: ${p.author}` : null,
    `mu: ${p.exo_sensitivity}`,
    `A: ${p.endo_response}`,
    `views percentile: ${p.views_percentile}`,
    `shares percentile: ${p.shares_percentile}`,
  ];
  return lines.filter((l) => l !== null).join('\n');
}

/** Interactive endo-exo scatter: x = endogenous response A, y = exogenous
 *  sensitivity mu, bubble area encodes total views, opacity encodes the
 *  shares percentile. Wheel zooms, drag pans, click selects. */
export class EndoExoMap {
  private svg: SVGSVGElement;
  private pendingList: HTMLElement;
  private tooltip: HTMLElement;
  private viewport: Viewport | null = null;
  private homeViewport: Viewport | null = null;
  private dragFrom: { x: number; y: number } | null = null;

  constructor(
    container: HTMLElement,
    private readonly store: AppStore,
  ) {
    this.svg = document.createElementNS(SVG_NS, 'svg');
    this.svg.setAttribute('viewBox', `0 0 ${WIDTH} ${HEIGHT}`);
    this.svg.classList.add('endo-exo-map');
    container.appendChild(this.svg);

    this.tooltip = document.createElement('div');
    this.tooltip.className = 'map-tooltip hidden';
    container.appendChild(this.tooltip);

    this.pendingList = document.createElement('div');
    this.pendingList.className = 'pending-list';
    container.appendChild(this.pendingList);

    const reset = document.createElement('button');
    reset.textContent = 'reset view';
    reset.addEventListener('click', () => {
      this.viewport = this.homeViewport;
      this.render();
    });
    container.appendChild(reset);

    this.svg.addEventListener('wheel', (event) => {
      if (this.viewport === null) return;
      event.preventDefault();
      const factor = event.deltaY > 0 ? 1.2 : 1 / 1.2;
      const rect = this.svg.getBoundingClientRect();
      this.viewport = zoomViewport(
        this.viewport,
        factor,
        event.clientX - rect.left,
        event.clientY - rect.top,
      );
      this.render();
    });
    this.svg.addEventListener('mousedown', (event) => {
      this.dragFrom = { x: event.clientX, y: event.clientY };
    });
    this.svg.addEventListener('mousemove', (event) => {
      if (this.dragFrom === null || this.viewport === null) return;
      this.viewport = panViewport(
        this.viewport,
        event.clientX - this.dragFrom.x,
        event.clientY - this.dragFrom.y,
      );
      this.dragFrom = { x: event.clientX, y: event.clientY };
      this.render();
    });
    window.addEventListener('mouseup', () => {
      this.dragFrom = null;
    });

    store.subscribe(() => this.render());
  }

  render(): void {
    const map = this.store.panels.map;
    this.svg.replaceChildren();
    if (map === null) return;

    const plotted = map.points
      .map((p) => ({ point: p, geometry: bubbleGeometry(p) }))
      .filter((e): e is { point: EndoExoPoint; geometry: NonNullable<ReturnType<typeof bubbleGeometry>> } =>
        e.geometry !== null,
      );
    if (this.viewport === null) {
      this.homeViewport = fitViewport(plotted.map((e) => e.geometry), WIDTH, HEIGHT);
      this.viewport = this.homeViewport;
    }
    const vp = this.viewport;

    for (const { point, geometry } of plotted) {
      const { cx, cy } = toPixels(geometry, vp);
      const circle = document.createElementNS(SVG_NS, 'circle');
      circle.setAttribute('cx', String(cx));
      circle.setAttribute('cy', String(cy));
      circle.setAttribute('r', String(geometry.r));
      circle.setAttribute('fill-opacity', String(geometry.opacity));
      circle.classList.add('bubble');
      if (point.video_id === this.store.active.selectedId) {
        circle.classList.add('selected');
      }
      circle.addEventListener('click', () => void this.store.selectVideo(point.video_id));
      circle.addEventListener('mouseenter', () => {
        this.tooltip.textContent = tooltipText(point);
        this.tooltip.classList.remove('hidden');
      });
      circle.addEventListener('mouseleave', () => this.tooltip.classList.add('hidden'));
      this.svg.appendChild(circle);
    }

    const ghost = this.store.ghostGeometry();
    if (ghost !== null) {
      const { cx, cy } = toPixels(ghost, vp);
      const circle = document.createElementNS(SVG_NS, 'circle');
      circle.setAttribute('cx', String(cx));
      circle.setAttribute('cy', String(cy));
      circle.setAttribute('r', String(ghost.r));
      circle.classList.add('ghost-bubble');
      this.svg.appendChild(circle);
    }

    // unfitted videos stay off the plot, listed aside
    this.pendingList.textContent = map.pending.length
      ? `pending (unfitted): ${map.pending.join(', ')}`
      : '';
  }
}
