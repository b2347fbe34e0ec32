/* tslint:disable */
/* eslint-disable */

/**
 * A surface of revolution moving by mean curvature, shown through its
 * meridian section.
 */
export class AxiSim {
    free(): void;
    [Symbol.dispose](): void;
    advance(duration: number): boolean;
    finished(): boolean;
    min_radius(): number;
    constructor(shape: string);
    /**
     * Closed section outline as `[x0, r0, x1, r1, ...]`.
     */
    points(): Float64Array;
    time(): number;
}

/**
 * A closed plane curve moving with normal speed `k^p`.
 */
export class CurveSim {
    free(): void;
    [Symbol.dispose](): void;
    advance(duration: number): boolean;
    area(): number;
    convex(): boolean;
    finished(): boolean;
    isoperimetric_ratio(): number;
    constructor(shape: string, p: number);
    /**
     * Vertices as `[x0, y0, x1, y1, ...]`.
     */
    points(): Float64Array;
    time(): number;
}

/**
 * Grim reaper `y = -ln cos x` translated up by `t`, as `[x0, y0, ...]`.
 */
export function grimReaper(n: number, half_width: number, t: number): Float64Array;

export function oracleRadius(kind: string, r0: number, p: number, t: number): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_axisim_free: (a: number, b: number) => void;
    readonly __wbg_curvesim_free: (a: number, b: number) => void;
    readonly axisim_advance: (a: number, b: number) => [number, number, number];
    readonly axisim_finished: (a: number) => number;
    readonly axisim_min_radius: (a: number) => number;
    readonly axisim_new: (a: number, b: number) => [number, number, number];
    readonly axisim_points: (a: number) => [number, number];
    readonly axisim_time: (a: number) => number;
    readonly curvesim_advance: (a: number, b: number) => [number, number, number];
    readonly curvesim_area: (a: number) => number;
    readonly curvesim_convex: (a: number) => number;
    readonly curvesim_finished: (a: number) => number;
    readonly curvesim_isoperimetric_ratio: (a: number) => number;
    readonly curvesim_new: (a: number, b: number, c: number) => [number, number, number];
    readonly curvesim_points: (a: number) => [number, number];
    readonly curvesim_time: (a: number) => number;
    readonly grimReaper: (a: number, b: number, c: number) => [number, number, number, number];
    readonly oracleRadius: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
