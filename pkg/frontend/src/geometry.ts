import type { EndoExoPoint } from './types';

// Bubble radius is proportional to sqrt(views_total) so area encodes views.
export const RADIUS_SCALE = 0.12;
export const MIN_RADIUS = 3;

export interface BubbleGeometry {
  x: number; // data space: endogenous response A
  y: number; // data space: exogenous sensitivity mu
  r: number;
  opacity: number; // color depth, driven by shares_percentile
}

export function bubbleRadius(viewsTotal: number): number {
  return Math.max(MIN_RADIUS, Math.sqrt(Math.max(viewsTotal, 0)) * RADIUS_SCALE);
}

// shares_percentile maps linearly onto opacity; unknown percentile renders faint
export function bubbleOpacity(sharesPercentile: number | null): number {
  if (sharesPercentile === null) return 0.25;
  return 0.25 + 0.75 * (sharesPercentile / 100);
}

/** Geometry of a map bubble in data space; supercritical points have no
 *  finite A and are not plotted. */
export function bubbleGeometry(point: EndoExoPoint): BubbleGeometry | null {
  if (point.endo_response === null) return null;
  return {
    x: point.endo_response,
    y: point.exo_sensitivity,
    r: bubbleRadius(point.views_total),
    opacity: bubbleOpacity(point.shares_percentile),
  };
}

export interface Viewport {
  // data-space window mapped onto the pixel box
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
  width: number;
  height: number;
}

export function toPixels(g: BubbleGeometry, vp: Viewport): { cx: number; cy: number } {
  const cx = ((g.x - vp.xMin) / (vp.xMax - vp.xMin)) * vp.width;
  // y axis points up: larger mu renders higher
  const cy = vp.height - ((g.y - vp.yMin) / (vp.yMax - vp.yMin)) * vp.height;
  return { cx, cy };
}

export function fitViewport(
  geometries: BubbleGeometry[],
  width: number,
  height: number,
): Viewport {
  const xs = geometries.map((g) => g.x);
  const ys = geometries.map((g) => g.y);
  const xMax = xs.length ? Math.max(...xs) : 1;
  const yMax = ys.length ? Math.max(...ys) : 1;
  return { xMin: 0, xMax: xMax * 1.1, yMin: 0, yMax: yMax * 1.1, width, height };
}

export function zoomViewport(vp: Viewport, factor: number, px: number, py: number): Viewport {
  // keep the data point under the cursor fixed while scaling the window
  const fx = px / vp.width;
  const fy = 1 - py / vp.height;
  const x = vp.xMin + fx * (vp.xMax - vp.xMin);
  const y = vp.yMin + fy * (vp.yMax - vp.yMin);
  return {
    ...vp,
    xMin: x - (x - vp.xMin) * factor,
    xMax: x + (vp.xMax - x) * factor,
    yMin: y - (y - vp.yMin) * factor,
    yMax: y + (vp.yMax - y) * factor,
  };
}

export function panViewport(vp: Viewport, dxPx: number, dyPx: number): Viewport {
  const dx = (-dxPx / vp.width) * (vp.xMax - vp.xMin);
  const dy = (dyPx / vp.height) * (vp.yMax - vp.yMin);
  return { ...vp, xMin: vp.xMin + dx, xMax: vp.xMax + dx, yMin: vp.yMin + dy, yMax: vp.yMax + dy };
}
