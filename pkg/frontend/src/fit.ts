/** Least-squares line fits used for slope annotations. */

export interface LineFit {
  slope: number;
  intercept: number;
}

export function fitLine(xs: number[], ys: number[]): LineFit {
  if (xs.length !== ys.length || xs.length < 2) {
    throw new Error("need at least two paired points");
  }
  const n = xs.length;
  const xMean = xs.reduce((a, b) => a + b, 0) / n;
  const yMean = ys.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    const dx = xs[i]! - xMean;
    sxx += dx * dx;
    sxy += dx * (ys[i]! - yMean);
  }
  if (sxx === 0) {
    throw new Error("degenerate fit: all x values equal");
  }
  const slope = sxy / sxx;
  return { slope, intercept: yMean - slope * xMean };
}

/** Slope of log10(y) against log10(x); inputs must be positive. */
export function fitLogLogSlope(xs: number[], ys: number[]): number {
  for (const v of [...xs, ...ys]) {
    if (!(v > 0)) {
      throw new Error(`log-log fit needs positive values, got ${v}`);
    }
  }
  return fitLine(xs.map(Math.log10), ys.map(Math.log10)).slope;
}
