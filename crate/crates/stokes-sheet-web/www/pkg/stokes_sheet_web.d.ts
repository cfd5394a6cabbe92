/* tslint:disable */
/* eslint-disable */

export class Simulation {
    free(): void;
    [Symbol.dispose](): void;
    advance(steps: number): void;
    amplitude(): number;
    constructor(mu_plus: number, mu_minus: number, sigma: number, theta: number, n: number, cos: Float64Array, sin: Float64Array, dt: number);
    nodes(): Float64Array;
    profile(): Float64Array;
    slope(): number;
    time(): number;
}

export function branch(ell: number, n: number, s_max: number, ds: number): Float64Array;

/**
 * Samples of the branch equilibrium with `cos(ell xi)` amplitude `s`.
 */
export function branchProfile(ell: number, s: number, n: number): Float64Array;

export function flatSpectrum(mu_plus: number, mu_minus: number, sigma: number, theta: number, kmax: number, n: number): Float64Array;

export function lambdaStar(): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_simulation_free: (a: number, b: number) => void;
    readonly branch: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly branchProfile: (a: number, b: number, c: number) => [number, number, number, number];
    readonly flatSpectrum: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly lambdaStar: () => number;
    readonly simulation_advance: (a: number, b: number) => [number, number];
    readonly simulation_amplitude: (a: number) => number;
    readonly simulation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number];
    readonly simulation_nodes: (a: number) => [number, number];
    readonly simulation_profile: (a: number) => [number, number];
    readonly simulation_slope: (a: number) => number;
    readonly simulation_time: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
