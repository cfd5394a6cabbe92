/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_simulation_free: (a: number, b: number) => void;
export const branch: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const branchProfile: (a: number, b: number, c: number) => [number, number, number, number];
export const flatSpectrum: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const lambdaStar: () => number;
export const simulation_advance: (a: number, b: number) => [number, number];
export const simulation_amplitude: (a: number) => number;
export const simulation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number];
export const simulation_nodes: (a: number) => [number, number];
export const simulation_profile: (a: number) => [number, number];
export const simulation_slope: (a: number) => number;
export const simulation_time: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
