/* tslint:disable */
/* eslint-disable */

export class NetRun {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly diverged: boolean;
    readonly empiricalPl: number;
    readonly lambda0: number;
    readonly losses: Float64Array;
}

export class QuadraticPath {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly columns: number;
    readonly radius: number;
    readonly rows: Float64Array;
}

export function quadraticPath(lambda1: number, lambda2: number, x0: number, y0: number, eta: number, gamma: number, delta: number, theta: number, steps: number, seed: bigint): QuadraticPath;

export function stepSizeCurve(eta: number, gamma: number, delta: number, lo: number, hi: number, n: number): Float64Array;

export function wideNet(width: number, samples: number, eta: number, gamma: number, delta: number, iterations: number, seed: bigint): NetRun;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_netrun_free: (a: number, b: number) => void;
    readonly __wbg_quadraticpath_free: (a: number, b: number) => void;
    readonly netrun_diverged: (a: number) => number;
    readonly netrun_empiricalPl: (a: number) => number;
    readonly netrun_lambda0: (a: number) => number;
    readonly netrun_losses: (a: number) => [number, number];
    readonly quadraticPath: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: bigint) => [number, number, number];
    readonly quadraticpath_columns: (a: number) => number;
    readonly quadraticpath_radius: (a: number) => number;
    readonly quadraticpath_rows: (a: number) => [number, number];
    readonly stepSizeCurve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly wideNet: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
