/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_scene_free: (a: number, b: number) => void;
export const principalAngles: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const scene_classes: (a: number) => [number, number];
export const scene_cluster: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const scene_compareGroup: (a: number, b: number) => [number, number, number, number];
export const scene_distortionHistory: (a: number) => [number, number];
export const scene_generators: (a: number) => [number, number];
export const scene_labels: (a: number) => [number, number];
export const scene_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const scene_planeBases: (a: number) => [number, number];
export const scene_planeCount: (a: number) => number;
export const scene_prototypes: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
