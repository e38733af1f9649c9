// Form model behind the command palette.  One labeled input per
// parameter, a script buffer that tracks the rendered template, and an
// override flag that flips once the user edits the buffer by hand.

import { CommandDoc } from "./types.js";

export interface ParamField {
  label: string;
  value: string;
}

export interface FormModel {
  command: CommandDoc;
  fields: ParamField[];
  buffer: string;
  edited: boolean;
}

const PLACEHOLDER = /\$PAR(\d+)\$/g;

/**
 * Fill the template's $PARn$ slots.  Single left-to-right pass, same as
 * the service: placeholder text inside an argument value stays literal.
 */
export function renderScript(template: string, args: string[]): string {
  return template.replace(PLACEHOLDER, (whole, digits: string) => {
    const arg = args[Number(digits) - 1];
    return arg === undefined ? whole : arg;
  });
}

/** Fresh form for a command; zero-parameter commands render immediately. */
export function formModel(command: CommandDoc): FormModel {
  const fields = command.param_descriptions.map((label) => ({ label, value: "" }));
  return {
    command,
    fields,
    buffer: fields.length === 0 ? command.template : "",
    edited: false,
  };
}

/** Re-render the buffer from current field values unless the user took over. */
export function refreshBuffer(model: FormModel): FormModel {
  if (model.edited) return model;
  const args = model.fields.map((f) => f.value);
  return { ...model, buffer: renderScript(model.command.template, args) };
}

export function setField(model: FormModel, index: number, value: string): FormModel {
  const fields = model.fields.map((f, i) => (i === index ? { ...f, value } : f));
  return refreshBuffer({ ...model, fields });
}

/** User typed into the script buffer; from here on the buffer wins. */
export function editBuffer(model: FormModel, text: string): FormModel {
  const args = model.fields.map((f) => f.value);
  const auto = renderScript(model.command.template, args);
  return { ...model, buffer: text, edited: text !== auto };
}

/** Empty-field and arity problems, one message per offending input. */
export function validate(model: FormModel): string[] {
  const errors: string[] = [];
  if (model.fields.length !== model.command.param_count) {
    errors.push(
      `${model.command.name} takes ${model.command.param_count} parameters, form has ${model.fields.length}`,
    );
  }
  if (model.edited) {
    // the override script is what runs; fields may stay blank
    if (model.buffer.trim() === "") errors.push("script buffer is empty");
  } else {
    model.fields.forEach((f, i) => {
      if (f.value.trim() === "") errors.push(`parameter ${i + 1} (${f.label}) is empty`);
    });
  }
  return errors;
}

export interface RunPayload {
  name: string;
  args: string[];
  scriptOverride?: string;
}

/** What to POST; an edited buffer rides along as script_override. */
export function runPayload(model: FormModel): RunPayload {
  const problems = validate(model);
  if (problems.length > 0) throw new Error(problems.join("; "));
  const payload: RunPayload = {
    name: model.command.name,
    args: model.fields.map((f) => f.value),
  };
  if (model.edited) payload.scriptOverride = model.buffer;
  return payload;
}
