export {
  CsvFormatError,
  numberAt,
  parseCsv,
  requireColumns,
  type Cell,
  type CsvTable,
} from "./csv.js";
export {
  decadeTicks,
  formatLinearTick,
  formatLogTick,
  linearScale,
  log10Scale,
  makeScale,
  rangeTicks,
  type ScaleKind,
} from "./scales.js";
export { el, esc, fmt, text } from "./svg.js";
export {
  renderLineChart,
  visibleRuns,
  type AxisSpec,
  type ChartConfig,
  type LegendCorner,
  type Marker,
  type Point,
  type Series,
} from "./chart.js";
export {
  buildFigure,
  FIGURE_KINDS,
  FigureConfigError,
  type FigureInput,
  type FigureKind,
  type FigureOptions,
} from "./figures.js";
export { runCli } from "./cli.js";
