import { writeFileSync } from "node:fs";
import { CsvError, loadCurve, type Curve } from "./csv.js";
import { renderSvg, type Axes } from "./svg.js";

export type FigureId = 1 | 2;

export interface FigureSpec {
  figure: FigureId;
  csvFiles: string[];
  outFile: string;
}

interface FigureLayout {
  axes: Axes;
  /** Function ids that must all be present across the input CSVs. */
  required: string[];
}

const LAYOUTS: Record<FigureId, FigureLayout> = {
  1: {
    axes: { xMin: -1, xMax: 1, yMin: -1, yMax: 1, xLabel: "entropy rate", yLabel: "rate" },
    required: ["R", "C", "upper_qq", "upper_cq"],
  },
  2: {
    axes: { xMin: -1, xMax: 1, yMin: 0, yMax: 1, xLabel: "entropy rate", yLabel: "uncertainty rate" },
    required: ["gamma", "gamma_d"],
  },
};

/** Load and order the curves for a figure, verifying every required id appears. */
export function loadFigureCurves(spec: FigureSpec): Curve[] {
  const layout = LAYOUTS[spec.figure];
  const curves = spec.csvFiles.map(loadCurve);
  const byId = new Map(curves.map((c) => [c.id, c]));
  for (const id of layout.required) {
    if (!byId.has(id)) {
      throw new CsvError(
        spec.csvFiles.join(","),
        `figure ${spec.figure} needs curve '${id}'; got [${curves.map((c) => c.id).join(", ")}]`,
      );
    }
  }
  return layout.required.map((id) => byId.get(id)!);
}

/** Render one figure to SVG; pure function of the CSV contents. */
export function render(spec: FigureSpec): string {
  const layout = LAYOUTS[spec.figure];
  const svg = renderSvg(loadFigureCurves(spec), layout.axes);
  writeFileSync(spec.outFile, svg);
  return spec.outFile;
}

export function figureAxes(figure: FigureId): Axes {
  return { ...LAYOUTS[figure].axes };
}
