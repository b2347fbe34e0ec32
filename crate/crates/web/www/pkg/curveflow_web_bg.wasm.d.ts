/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_axisim_free: (a: number, b: number) => void;
export const __wbg_curvesim_free: (a: number, b: number) => void;
export const axisim_advance: (a: number, b: number) => [number, number, number];
export const axisim_finished: (a: number) => number;
export const axisim_min_radius: (a: number) => number;
export const axisim_new: (a: number, b: number) => [number, number, number];
export const axisim_points: (a: number) => [number, number];
export const axisim_time: (a: number) => number;
export const curvesim_advance: (a: number, b: number) => [number, number, number];
export const curvesim_area: (a: number) => number;
export const curvesim_convex: (a: number) => number;
export const curvesim_finished: (a: number) => number;
export const curvesim_isoperimetric_ratio: (a: number) => number;
export const curvesim_new: (a: number, b: number, c: number) => [number, number, number];
export const curvesim_points: (a: number) => [number, number];
export const curvesim_time: (a: number) => number;
export const grimReaper: (a: number, b: number, c: number) => [number, number, number, number];
export const oracleRadius: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
