/* tslint:disable */
/* eslint-disable */

/**
 * A synthetic scene: planes scattered around a few random lines, plus the
 * latest clustering of them.
 */
export class Scene {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Generator group of every plane.
     */
    classes(): Uint32Array;
    /**
     * Clusters the planes into `centers` groups with line prototypes and
     * returns the purity of the result against the generator groups.
     */
    cluster(method: string, centers: number, seed: number): number;
    /**
     * Fits all three prototype kinds to one generator group. Returns nine
     * numbers (svbf, flag mean, flag median lines) followed by each line's
     * angle in radians to the true generator.
     */
    compareGroup(group: number): Float64Array;
    distortionHistory(): Float64Array;
    /**
     * Generating lines, three numbers per line.
     */
    generators(): Float64Array;
    /**
     * Cluster index of every plane from the last `cluster` call.
     */
    labels(): Uint32Array;
    constructor(groups: number, per_group: number, noise: number, seed: number);
    /**
     * Plane bases, six numbers (two unit columns) per plane.
     */
    planeBases(): Float64Array;
    /**
     * Prototype lines from the last `cluster` call, three numbers each.
     */
    prototypes(): Float64Array;
    readonly planeCount: number;
}

/**
 * Principal angles (radians, ascending) between the spans of two sets of
 * vectors in `R³`, each given as consecutive `x, y, z` triples.
 */
export function principalAngles(a: Float64Array, b: Float64Array): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_scene_free: (a: number, b: number) => void;
    readonly principalAngles: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly scene_classes: (a: number) => [number, number];
    readonly scene_cluster: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly scene_compareGroup: (a: number, b: number) => [number, number, number, number];
    readonly scene_distortionHistory: (a: number) => [number, number];
    readonly scene_generators: (a: number) => [number, number];
    readonly scene_labels: (a: number) => [number, number];
    readonly scene_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly scene_planeBases: (a: number) => [number, number];
    readonly scene_planeCount: (a: number) => number;
    readonly scene_prototypes: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
