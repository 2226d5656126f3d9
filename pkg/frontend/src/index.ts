export { loadCurve, CsvError } from "./csv.js";
export type { Curve, CurvePoint } from "./csv.js";
export { renderSvg, curvePath } from "./svg.js";
export type { Axes } from "./svg.js";
export { render, loadFigureCurves, figureAxes } from "./figures.js";
export type { FigureSpec, FigureId } from "./figures.js";
export { main } from "./cli.js";
