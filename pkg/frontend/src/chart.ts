import type { AppStore } from './state';

const SVG_NS = 'http://www.w3.org/2000/svg';
const WIDTH = 520;
const HEIGHT = 260;
const PAD = 8;

function polyline(values: number[], offset: number, days: number, yMax: number, cls: string) {
  const el = document.createElementNS(SVG_NS, 'polyline');
  const points = values
    .map((v, i) => {
      const x = PAD + ((offset + i) / Math.max(days - 1, 1)) * (WIDTH - 2 * PAD);
      const y = HEIGHT - PAD - (v / yMax) * (HEIGHT - 2 * PAD);
      return `${x},${y}`;
    })
    .join(' ');
  el.setAttribute('points', points);
  el.classList.add('series-line', cls);
  return el;
}

/** Popularity panel: observed, fitted and forecast views plus shares, with
 *  a visible boundary at the end of the training window. Every rendered
 *  value comes straight from the series payload. */
export class PopularityChart {
  private svg: SVGSVGElement;
  private readout: HTMLElement;
  private placeholder: HTMLElement;

  constructor(
    container: HTMLElement,
    private readonly store: AppStore,
  ) {
    this.svg = document.createElementNS(SVG_NS, 'svg');
    this.svg.setAttribute('viewBox', `0 0 ${WIDTH} ${HEIGHT}`);
    this.svg.classList.add('popularity-chart');
    container.appendChild(this.svg);

    this.readout = document.createElement('div');
    this.readout.className = 'chart-readout';
    container.appendChild(this.readout);

    this.placeholder = document.createElement('div');
    this.placeholder.className = 'chart-placeholder';
    container.appendChild(this.placeholder);

    this.svg.addEventListener('mousemove', (event) => {
      const series = this.store.panels.series;
      if (series === null) return;
      const rect = this.svg.getBoundingClientRect();
      const frac = (event.clientX - rect.left - PAD) / (WIDTH - 2 * PAD);
      const day = Math.round(frac * Math.max(series.to - 1, 1));
      if (day < 0 || day >= series.to) return;
      const parts = [
        `day ${day}`,
        `observed ${series.observed_views[day]}`,
        `shares ${series.shares[day]}`,
      ];
      if (day < series.fitted_views.length) {
        parts.push(`fitted ${series.fitted_views[day]}`);
      }
      const fIdx = day - series.forecast_from;
      if (fIdx >= 0 && fIdx < series.forecast_views.length) {
        parts.push(`forecast ${series.forecast_views[fIdx]}`);
      }
      this.readout.textContent = parts.join('  ');
    });

    store.subscribe(() => this.render());
  }

  render(): void {
    const series = this.store.panels.series;
    this.svg.replaceChildren();
    this.readout.textContent = '';
    if (series === null) {
      const job = this.store.panels.job;
      this.placeholder.textContent =
        this.store.active.selectedId === null
          ? 'select a video'
          : job
            ? `not fitted yet (job ${job.state})`
            : 'not fitted yet';
      return;
    }
    this.placeholder.textContent = '';

    const sim = this.store.active.lastSimulation;
    const all = [
      ...series.observed_views,
      ...series.shares,
      ...series.fitted_views,
      ...series.forecast_views,
      ...(sim?.promoted_views ?? []),
    ];
    const yMax = Math.max(...all, 1);
    const days = series.to;

    this.svg.appendChild(polyline(series.observed_views, 0, days, yMax, 'observed'));
    this.svg.appendChild(polyline(series.shares, 0, days, yMax, 'shares'));
    this.svg.appendChild(polyline(series.fitted_views, 0, days, yMax, 'fitted'));
    this.svg.appendChild(
      polyline(series.forecast_views, series.forecast_from, days, yMax, 'forecast'),
    );
    if (sim !== null) {
      this.svg.appendChild(polyline(sim.promoted_views, 0, days, yMax, 'promoted'));
    }

    // train/forecast boundary
    const boundary = document.createElementNS(SVG_NS, 'line');
    const x = PAD + (series.forecast_from / Math.max(days - 1, 1)) * (WIDTH - 2 * PAD);
    boundary.setAttribute('x1', String(x));
    boundary.setAttribute('x2', String(x));
    boundary.setAttribute('y1', String(PAD));
    boundary.setAttribute('y2', String(HEIGHT - PAD));
    boundary.classList.add('train-boundary');
    this.svg.appendChild(boundary);
  }
}
