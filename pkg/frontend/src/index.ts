export * from "./protocol.js";
export * from "./kinematics.js";
export * from "./view.js";
export * from "./input.js";
export * from "./viewmodel.js";
export * from "./render.js";
export * from "./client.js";
