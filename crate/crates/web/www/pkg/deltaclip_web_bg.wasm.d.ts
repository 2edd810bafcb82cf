/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_netrun_free: (a: number, b: number) => void;
export const __wbg_quadraticpath_free: (a: number, b: number) => void;
export const netrun_diverged: (a: number) => number;
export const netrun_empiricalPl: (a: number) => number;
export const netrun_lambda0: (a: number) => number;
export const netrun_losses: (a: number) => [number, number];
export const quadraticPath: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: bigint) => [number, number, number];
export const quadraticpath_columns: (a: number) => number;
export const quadraticpath_radius: (a: number) => number;
export const quadraticpath_rows: (a: number) => [number, number];
export const stepSizeCurve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const wideNet: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
